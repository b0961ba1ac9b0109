// Benchmark diagnostics: discrete error norms with power-of-two restriction,
// Richardson convergence orders, the equilibrium shell pressure, structure
// areas, tether lift/drag, Strouhal extraction, the diagnostics time series
// with its CSV form, and readers for the plain-text field dumps.
#pragma once

#include "ibfsi/coupling.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ibfsi {

enum class ShellKind { anisotropic, orthotropic };

// Far-field constant of the zero-mean equilibrium pressure of the static
// annular shell. The orthotropic interface layers add pi mu_e R to the
// integral relative to the anisotropic ramp, so its constant sits lower.
Real shell_exact_p0(ShellKind kind, Real R, Real w, Real mu_e);

// Equilibrium pressure at x for the static (gamma = 0) shell centered at
// `center`: a plateau inside r < R, a linear ramp of slope -mu_e/(w R)
// across the shell, and the constant p0 outside, zero-mean over the unit
// square. The orthotropic variant jumps by mu_e/w at r = R and by
// mu_e R/(w(R+w)) at r = R+w, carried by the terminating radial fibers.
Real shell_exact_pressure(ShellKind kind, Real R, Real w, Real mu_e, Vec2 x,
                          Vec2 center = Vec2(0.5, 0.5));

// Norms of a - b per the Eulerian inner products (h^2 weights, halved on
// boundary faces of non-periodic sides). `g` is b's grid; a may be finer by
// a power-of-two cell ratio, in which case it is restricted by averaging.
// Any other shape mismatch throws std::invalid_argument.
FieldNorms error_norms(CellField a, const CellField& b, const GridSpec& g);
FieldNorms error_norms(StaggeredField a, const StaggeredField& b,
                       const GridSpec& g);

struct RichardsonOrders {
  FieldNorms e_coarse; // |restrict(medium) - coarse| on the N grid
  FieldNorms e_fine;   // |restrict(fine) - medium| on the 2N grid
  FieldNorms order;    // log2(e_coarse/e_fine) per norm
};

// Convergence orders from solutions on grids of N, 2N and 4N cells at the
// same time; `g` is the coarse grid. A vanishing error difference leaves the
// affected orders NaN and notes the degeneracy on std::cerr.
RichardsonOrders richardson_order(const CellField& coarse,
                                  const CellField& medium,
                                  const CellField& fine, const GridSpec& g);
RichardsonOrders richardson_order(const StaggeredField& coarse,
                                  const StaggeredField& medium,
                                  const StaggeredField& fine,
                                  const GridSpec& g);

// Deformed area sum_e sum_q det F w_q over the assembly quadrature. A global
// orientation reversal (annular strips embed that way) is folded out by the
// sign at the first quadrature point; a sign change anywhere past it is a
// genuinely inverted element and throws std::runtime_error naming it.
// 1D meshes have no area and throw std::invalid_argument.
Real structure_volume(const FeMesh& mesh, const Config& x);

struct LiftDrag {
  Vec2 force = Vec2::Zero(); // net fluid-on-body force
  Real cd = 0, cl = 0;       // force / (rho u_inf^2 d / 2)
};

// Net force the fluid exerts on a tethered body, -sum_Q F(X_Q) w_Q over the
// rule's interaction points, where `tether_force` holds the nodal force
// density applied to the fluid. Requires a volume rule (facet rules carry
// trace-ordered data) and positive rho, u_inf, d.
LiftDrag lift_drag(const InteractionRule& rule, const FeMesh& mesh,
                   const NodeArray& tether_force, Real rho, Real u_inf,
                   Real d);

// Dominant oscillation frequency of a uniformly sampled series, as
// St = f d / u_inf. Drops the leading `discard` fraction, removes the mean,
// applies a Hann window, and refines the periodogram peak by parabolic
// interpolation in log power. Returns nullopt when the detrended signal has
// no peak above the noise floor. Throws std::invalid_argument on size
// mismatch, non-uniform sampling, or fewer than 16 retained samples.
std::optional<Real> strouhal(const std::vector<Real>& t,
                             const std::vector<Real>& lift, Real d,
                             Real u_inf, Real discard = 0.5);

struct DiagnosticsRecord {
  Real t = 0, cl = 0, cd = 0, volume = 0, ke = 0, umax = 0;
};

struct DiagnosticsSeries {
  std::vector<DiagnosticsRecord> rows;

  // throws std::invalid_argument unless t exceeds the last timestamp
  void append(const DiagnosticsRecord& r);
};

// CSV with header t,CL,CD,volume,ke,umax, one row per record, 17 significant
// digits (round-trips doubles exactly).
void              write_csv(std::ostream& os, const DiagnosticsSeries& s);
DiagnosticsSeries read_csv(std::istream& is); // std::runtime_error on bad input

// One record of the plain-text field dump format (see dump_field).
struct FieldRecord {
  std::string name;
  int         n1 = 0, n2 = 0;
  Real        h = 0;
  VecX        data; // row-major
};

std::vector<FieldRecord> read_fields(std::istream& is);

const FieldRecord& find_record(const std::vector<FieldRecord>& recs,
                               std::string_view name); // throws when missing

// Shape-checked reassembly against a grid; throws std::runtime_error on a
// mismatch.
CellField      to_cell(const FieldRecord& rec, const GridSpec& g);
StaggeredField to_staggered(const FieldRecord& rec1, const FieldRecord& rec2,
                            const GridSpec& g);

} // namespace ibfsi
