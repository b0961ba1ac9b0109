// Scenario configuration: the benchmark selector plus every tunable knob,
// read from flat key = value text grouped in per-module sections. Parsing is
// strict (unknown sections, unknown keys, duplicates and malformed values all
// fail with file:line diagnostics); scenario-dependent defaults are resolved
// afterwards so a written config reloads to the same resolved state.
//
// Sections and keys:
//   [scenario]  kind N M_fac gamma perturb_amp
//   [fluid]     rho mu
//   [structure] mu_e p0 kappa eta formulation
//   [coupling]  kernel density rebuild_threshold
//   [time]      dt_factor t_end cfl_max
//   [solver]    tol
//   [output]    dir every dump_fields
// Keys that do not apply to the selected scenario are accepted and ignored,
// so one base file can drive a sweep across scenarios.
#pragma once

#include "ibfsi/ins_solver.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ibfsi {

enum class ScenarioKind {
  shell_anisotropic,
  shell_orthotropic,
  soft_disc_cavity,
  cylinder_flow,
  taylor_green,
};

// Exact spelling used in config files: ShellAnisotropic, ShellOrthotropic,
// SoftDiscCavity, CylinderFlow, TaylorGreen. Throws on anything else.
ScenarioKind scenario_from_name(std::string_view name);
const char*  scenario_name(ScenarioKind kind);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Negative sentinels mean "resolve the scenario default".
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::taylor_green;
  int          n        = 0; // cells across the square domain
  int          m_fac    = 2; // Lagrangian node spacing in grid cells
  Real         gamma    = 0; // shell ellipticity; 0 = equilibrium

  Real rho  = 1;
  Real mu   = -1;
  Real mu_e = -1;
  Real p0   = 0;  // disc pre-stress
  Real kappa = -1, eta = -1; // rigid tether stiffness / damping

  KernelKind  kernel            = KernelKind::ib4;
  Formulation formulation       = Formulation::partitioned;
  Real        density           = 3.0;
  Real        rebuild_threshold = 0.1;

  Real dt_factor  = -1; // dt = dt_factor * h
  Real t_end      = -1;
  Real cfl_max    = 0.5;
  Real solver_tol = 1e-9;

  Real perturb_amp = 0.05; // transverse inflow pulse (cylinder, t in [2,6])

  int         output_every = 0; // records every this many steps
  std::string output_dir   = ".";
  bool        dump_fields  = true;
};

// Parse alone: keys as given, sentinels untouched. `name` labels diagnostics.
ScenarioConfig parse_config(std::istream& is, std::string_view name);

// Fills the scenario-dependent defaults (grid size, viscosity, stiffness,
// step factor, horizon, output cadence) for any field left at its sentinel.
void resolve_defaults(ScenarioConfig& cfg);

// Invariant checks on a resolved config; throws ConfigError naming the key.
// Shell grids must be powers of two, at least 32, and large enough for the
// M_fac-derived element count; M_fac is one of 1, 2, 4 everywhere.
void validate_config(const ScenarioConfig& cfg);

// parse + resolve + validate
ScenarioConfig load_config(std::istream& is, std::string_view name);

// Writes every section with the current values; load_config on the output
// reproduces the struct bit for bit.
void write_config(std::ostream& os, const ScenarioConfig& cfg);

// A study is a base config plus [study] sweep lists:
//   [study]  N = 64 128 256
//            M_fac = 1 4
// Runs are the cross product; omitted lists fall back to the base values.
struct StudyConfig {
  ScenarioConfig   base;
  std::vector<int> n_values;
  std::vector<int> m_fac_values;
};

StudyConfig load_study(std::istream& is, std::string_view name);

} // namespace ibfsi
