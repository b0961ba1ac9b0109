// Crank-Nicolson saddle-point solve for one time step:
//   (rho/dt) u - (mu/2) lap_h u + grad_h p = r,   div_h u = 0,
// with the boundary closures described in mac_grid.hpp. Three paths, chosen
// from the bc combination at setup:
//   * fully periodic: exact Fourier diagonalization, mode by mode;
//   * slip walls on the x2 sides with velocity / slip / traction ends in x1
//     (channel with an obstacle): exact direct solve, one small banded
//     factorization per transverse cosine/sine mode, wrapped in FGMRES to
//     police roundoff;
//   * remaining wall/periodic combinations with velocity or slip sides:
//     FGMRES with an approximate projection preconditioner whose Helmholtz
//     and Poisson pieces are exact separable transform solves.
// The pressure is gauge-fixed to zero mean whenever no traction side pins it.
#pragma once

#include "ibfsi/mac_grid.hpp"

#include <memory>
#include <stdexcept>
#include <string>

namespace ibfsi {

struct FluidParams {
  Real rho = 1;
  Real mu  = 1;
};

void validate(const FluidParams& fp); // throws std::invalid_argument

struct SaddleSolveReport {
  int  iterations = 0;
  Real residual   = 0; // final relative residual of the full saddle system
  Real divergence = 0; // max norm of div_h u on return
};

// Thrown when the iteration cap is reached before the tolerance.
struct SolverFailure : std::runtime_error {
  SolverFailure(const std::string& msg, SaddleSolveReport r)
      : std::runtime_error(msg), report(r) {}
  SaddleSolveReport report;
};

class SaddleSolver {
public:
  // Geometry, bc kinds, rho, mu and dt are fixed at construction (the
  // factorizations depend on all of them). tol is the relative residual
  // target and must lie in (0, 1e-4].
  SaddleSolver(const GridSpec& g, FluidParams fp, Real dt, Real tol = 1e-9);
  ~SaddleSolver();
  SaddleSolver(SaddleSolver&&) noexcept;
  SaddleSolver& operator=(SaddleSolver&&) noexcept;

  // rhs carries the assembled explicit side at unpinned faces. Boundary
  // values for the new time level are read from gnow.bc_value; gnow must
  // match the setup grid in shape and bc kinds. u0, p0 seed the Krylov
  // paths. Pinned faces of u are set to their boundary values on return.
  SaddleSolveReport solve(const StaggeredField& rhs, const GridSpec& gnow,
                          const StaggeredField& u0, const CellField& p0,
                          StaggeredField& u, CellField& p) const;

  Real tol() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace ibfsi
