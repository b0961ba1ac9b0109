// Benchmark scenario wiring and the run driver: turns a ScenarioConfig into
// a grid, fluid, structures and initial data, advances the coupled system,
// and reduces the run to the quantities each benchmark reports.
//
//   TaylorGreen       periodic decaying vortex sheet, no structure
//   ShellAnisotropic  pressurized annular shell, circumferential fibers only
//   ShellOrthotropic  the same geometry with circumferential + radial fibers
//   SoftDiscCavity    neo-Hookean disc carried around a lid-driven cavity
//   CylinderFlow      tethered rigid circle shedding vortices at Re 200 on
//                     the reduced uniform domain [-8,24] x [-16,16]
#pragma once

#include "ibfsi/config.hpp"
#include "ibfsi/diagnostics.hpp"

#include <functional>
#include <optional>

namespace ibfsi {

// fixed benchmark geometry
inline constexpr Real shell_radius    = 0.25; // inner radius
inline constexpr Real shell_width     = 0.0625;
inline constexpr Real disc_radius     = 0.2;
inline constexpr Real cylinder_radius = 0.5;

struct Scenario {
  ScenarioConfig cfg; // defaults resolved
  GridSpec       grid;
  FluidParams    fluid;
  Real           dt      = 0;
  long           n_steps = 0;
  std::vector<Structure>               structures;
  StaggeredField                       u0;
  std::vector<Config>                  chi0;
  std::function<void(Real, GridSpec&)> bc_update; // null when values fixed
  Real kappa = 0, eta = 0;                        // resolved tether strength
};

// Resolves defaults, validates, and builds the scenario. ConfigError on
// invariant violations; mesh construction failures propagate.
Scenario make_scenario(const ScenarioConfig& cfg);

struct RunResult {
  DiagnosticsSeries series;
  StaggeredField    u; // final state
  CellField         p;
  std::vector<Config> chi;
  Real t     = 0;
  long steps = 0;
  int  max_iterations = 0; // saddle iterations, worst step
  Real kappa = 0, eta = 0;

  // gamma = 0 shells: errors against the equilibrium solution, and the mean
  // computed pressure over r < R/2 (the exact value there is p0 + jump)
  std::optional<FieldNorms> u_error, p_error;
  std::optional<Real>       p_plateau;

  // structures with area: relative drift of the deformed area
  Real volume0 = 0, max_volume_change = 0;

  // cylinder: post-transient shedding statistics over the trailing half of
  // the series, and the largest force coefficient magnitude seen anywhere
  std::optional<Real> st, mean_cd, cl_amp;
  Real                max_force_coeff = 0;

  // Taylor-Green: |ke/ke0 - exp(-16 pi^2 nu t)| / exact at the final time
  std::optional<Real> ke_decay_error;
};

// Advances to t_end collecting diagnostics. Solver failures propagate.
RunResult simulate(const Scenario& sc);
RunResult simulate(const ScenarioConfig& cfg);

// simulate + outputs under cfg.output_dir: series.csv, report.txt and, with
// cfg.dump_fields, fields.txt plus mesh_<k>.txt per structure. Returns 0,
// or 2 for configuration/setup errors and 3 for solver failures (the CLI
// exit codes), with the reason on stderr.
int run_scenario(const ScenarioConfig& cfg);

// Fast self-checks: kernel identities, transfer adjointness, stress
// gradients, weak-form free sums, a coarse decay run, config round-trip.
// One line per check on `os`; true when everything passed.
bool verify_quick(std::ostream& os);

} // namespace ibfsi
