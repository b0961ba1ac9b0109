// Incompressible Navier-Stokes time stepping with immersed structures.
// Crank-Nicolson viscosity, Adams-Bashforth advection (one predictor-
// corrector sweep replaces the missing history on the first step), and
// midpoint structure updates through the interaction operators:
//
//   chi^{n+1/2} = chi^n + dt/2 J(chi^n) u^n
//   A = 3/2 adv(u^n) - 1/2 adv(u^{n-1})
//   rho/dt (u^{n+1} - u^n) + rho A
//       = -grad p^{n+1/2} + mu/2 L (u^{n+1} + u^n) + S(chi^{n+1/2}) F
//   div u^{n+1} = 0
//   chi^{n+1} = chi^n + dt J(chi^{n+1/2}) (u^{n+1} + u^n)/2
#pragma once

#include "ibfsi/advect.hpp"
#include "ibfsi/coupling.hpp"
#include "ibfsi/elasticity.hpp"
#include "ibfsi/saddle.hpp"

#include <functional>
#include <variant>
#include <vector>

namespace ibfsi {

enum class Formulation { partitioned, unified };

struct ElasticStructure {
  FeMesh            mesh;
  ConstitutiveModel model;
  Formulation       formulation = Formulation::partitioned;
};

// rigid boundary tethered to its anchor; forces are nodewise
struct PenaltyStructure {
  FeMesh       mesh;
  RigidPenalty penalty;
};

using Structure = std::variant<ElasticStructure, PenaltyStructure>;

struct TimeStepState {
  StaggeredField         u;       // u^n
  CellField              p;       // p^{n-1/2}
  StaggeredField         adv;     // u^{n-1} . grad u^{n-1}
  std::vector<Config>    chi;     // structure configurations chi^n
  std::vector<NodeArray> chi_dot; // most recent J(chi^n) u^n, per structure
  Real                   t    = 0;
  Real                   dt   = 0;
  long                   step = 0;
};

struct CouplingParams {
  KernelKind kernel            = KernelKind::ib4;
  Real       density           = 3.0; // interaction points per grid cell
  Real       rebuild_threshold = 0.1;
};

// Owns the saddle solver factorizations, structure mass solvers, and
// interaction rules (rebuilt when deformed element extents drift past the
// threshold). Boundary condition kinds and the grid are fixed at
// construction; boundary values may vary in time through the updater.
class IbSolver {
public:
  IbSolver(const GridSpec& g, FluidParams fp, Real dt,
           std::vector<Structure> structures, CouplingParams cp = {},
           Real solver_tol = 1e-9, Real cfl_max = 0.5);
  ~IbSolver();
  IbSolver(IbSolver&&) noexcept;
  IbSolver& operator=(IbSolver&&) noexcept;

  // uniform boundary values as a function of time (inflow ramps and the like)
  void set_boundary_values(std::function<void(Real, GridSpec&)> update);

  // chi0 holds one initial configuration per structure
  TimeStepState make_state(const StaggeredField& u0,
                           std::vector<Config> chi0) const;

  // Advances the state by one dt and returns the saddle report of the final
  // solve. Throws std::runtime_error when max|u^n| dt / h exceeds the CFL
  // bound, std::invalid_argument on a step-index mismatch.
  SaddleSolveReport ib_initial_step(TimeStepState& s); // requires s.step == 0
  SaddleSolveReport ib_step(TimeStepState& s);         // requires s.step >= 1
  SaddleSolveReport step(TimeStepState& s);            // dispatch on s.step

  const GridSpec&               grid() const;
  GridSpec                      grid_at(Real t) const; // values updated
  const std::vector<Structure>& structures() const;
  Real                          dt() const;
  Real                          cfl_max() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace ibfsi
