#include "ibfsi/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace ibfsi {

namespace {

constexpr struct {
  const char*  name;
  ScenarioKind kind;
} scenario_table[] = {
    {"ShellAnisotropic", ScenarioKind::shell_anisotropic},
    {"ShellOrthotropic", ScenarioKind::shell_orthotropic},
    {"SoftDiscCavity", ScenarioKind::soft_disc_cavity},
    {"CylinderFlow", ScenarioKind::cylinder_flow},
    {"TaylorGreen", ScenarioKind::taylor_green},
};

std::string trim(std::string s) {
  const auto sp = [](unsigned char c) { return std::isspace(c); };
  while (!s.empty() && sp(s.front()))
    s.erase(s.begin());
  while (!s.empty() && sp(s.back()))
    s.pop_back();
  return s;
}

bool is_shell(ScenarioKind k) {
  return k == ScenarioKind::shell_anisotropic ||
         k == ScenarioKind::shell_orthotropic;
}

struct LineContext {
  std::string_view file;
  int              line = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(std::string(file) + ":" + std::to_string(line) + ": " +
                      msg);
  }

  Real real(const std::string& key, const std::string& v) const {
    char*      end = nullptr;
    const Real x   = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x))
      fail("invalid value for '" + key + "': '" + v + "'");
    return x;
  }

  int integer(const std::string& key, const std::string& v) const {
    char*      end = nullptr;
    const long x   = std::strtol(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size())
      fail("invalid value for '" + key + "': '" + v + "'");
    return static_cast<int>(x);
  }

  bool boolean(const std::string& key, const std::string& v) const {
    if (v == "true" || v == "1")
      return true;
    if (v == "false" || v == "0")
      return false;
    fail("invalid value for '" + key + "': '" + v + "'");
  }

  std::vector<int> int_list(const std::string& key,
                            const std::string& v) const {
    std::vector<int>   out;
    std::istringstream ls(v);
    std::string        tok;
    while (ls >> tok)
      out.push_back(integer(key, tok));
    if (out.empty())
      fail("invalid value for '" + key + "': '" + v + "'");
    return out;
  }
};

// Returns false when the key is unknown in this section.
bool apply_key(ScenarioConfig& cfg, const std::string& sec,
               const std::string& key, const std::string& v,
               const LineContext& ctx) {
  if (sec == "scenario") {
    if (key == "kind") {
      for (const auto& entry : scenario_table)
        if (v == entry.name) {
          cfg.scenario = entry.kind;
          return true;
        }
      ctx.fail("invalid value for 'kind': '" + v + "'");
    }
    if (key == "N") {
      cfg.n = ctx.integer(key, v);
      if (cfg.n < 1)
        ctx.fail("invalid value for 'N': must be at least 1");
      return true;
    }
    if (key == "M_fac") {
      cfg.m_fac = ctx.integer(key, v);
      return true;
    }
    if (key == "gamma") {
      cfg.gamma = ctx.real(key, v);
      return true;
    }
    if (key == "perturb_amp") {
      cfg.perturb_amp = ctx.real(key, v);
      return true;
    }
    return false;
  }
  if (sec == "fluid") {
    if (key == "rho") {
      cfg.rho = ctx.real(key, v);
      return true;
    }
    if (key == "mu") {
      cfg.mu = ctx.real(key, v);
      if (!(cfg.mu > 0))
        ctx.fail("invalid value for 'mu': must be positive");
      return true;
    }
    return false;
  }
  if (sec == "structure") {
    if (key == "mu_e") {
      cfg.mu_e = ctx.real(key, v);
      if (cfg.mu_e < 0)
        ctx.fail("invalid value for 'mu_e': must be nonnegative");
      return true;
    }
    if (key == "p0") {
      cfg.p0 = ctx.real(key, v);
      return true;
    }
    if (key == "kappa") {
      cfg.kappa = ctx.real(key, v);
      if (cfg.kappa < 0)
        ctx.fail("invalid value for 'kappa': must be nonnegative");
      return true;
    }
    if (key == "eta") {
      cfg.eta = ctx.real(key, v);
      if (cfg.eta < 0)
        ctx.fail("invalid value for 'eta': must be nonnegative");
      return true;
    }
    if (key == "formulation") {
      if (v == "partitioned")
        cfg.formulation = Formulation::partitioned;
      else if (v == "unified")
        cfg.formulation = Formulation::unified;
      else
        ctx.fail("invalid value for 'formulation': '" + v + "'");
      return true;
    }
    return false;
  }
  if (sec == "coupling") {
    if (key == "kernel") {
      try {
        cfg.kernel = kernel_from_name(v);
      } catch (const std::invalid_argument&) {
        ctx.fail("invalid value for 'kernel': '" + v + "'");
      }
      return true;
    }
    if (key == "density") {
      cfg.density = ctx.real(key, v);
      return true;
    }
    if (key == "rebuild_threshold") {
      cfg.rebuild_threshold = ctx.real(key, v);
      return true;
    }
    return false;
  }
  if (sec == "time") {
    if (key == "dt_factor") {
      cfg.dt_factor = ctx.real(key, v);
      if (!(cfg.dt_factor > 0))
        ctx.fail("invalid value for 'dt_factor': must be positive");
      return true;
    }
    if (key == "t_end") {
      cfg.t_end = ctx.real(key, v);
      if (!(cfg.t_end > 0))
        ctx.fail("invalid value for 't_end': must be positive");
      return true;
    }
    if (key == "cfl_max") {
      cfg.cfl_max = ctx.real(key, v);
      return true;
    }
    return false;
  }
  if (sec == "solver") {
    if (key == "tol") {
      cfg.solver_tol = ctx.real(key, v);
      return true;
    }
    return false;
  }
  if (sec == "output") {
    if (key == "dir") {
      if (v.empty())
        ctx.fail("invalid value for 'dir': empty");
      cfg.output_dir = v;
      return true;
    }
    if (key == "every") {
      cfg.output_every = ctx.integer(key, v);
      if (cfg.output_every < 1)
        ctx.fail("invalid value for 'every': must be at least 1");
      return true;
    }
    if (key == "dump_fields") {
      cfg.dump_fields = ctx.boolean(key, v);
      return true;
    }
    return false;
  }
  ctx.fail("unknown section [" + sec + "]");
}

ScenarioConfig parse_impl(std::istream& is, std::string_view fname,
                          StudyConfig* study) {
  ScenarioConfig        cfg;
  std::string           line, section;
  std::set<std::string> seen;
  LineContext           ctx{fname, 0};

  while (std::getline(is, line)) {
    ++ctx.line;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(std::move(line));
    if (line.empty())
      continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        ctx.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> known{
          "scenario", "fluid",  "structure", "coupling",
          "time",     "solver", "output"};
      if (!known.count(section) && !(study && section == "study"))
        ctx.fail("unknown section [" + section + "]");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      ctx.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      ctx.fail("empty key");
    if (section.empty())
      ctx.fail("key '" + key + "' outside any section");
    if (!seen.insert(section + "." + key).second)
      ctx.fail("duplicate key '" + key + "'");

    if (section == "study") {
      if (key == "N")
        study->n_values = ctx.int_list(key, val);
      else if (key == "M_fac")
        study->m_fac_values = ctx.int_list(key, val);
      else
        ctx.fail("unknown key '" + key + "' in section [study]");
      continue;
    }
    if (!apply_key(cfg, section, key, val, ctx))
      ctx.fail("unknown key '" + key + "' in section [" + section + "]");
  }
  return cfg;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError("config: " + key + " " + why);
}

} // namespace

ScenarioKind scenario_from_name(std::string_view name) {
  for (const auto& entry : scenario_table)
    if (name == entry.name)
      return entry.kind;
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

const char* scenario_name(ScenarioKind kind) {
  for (const auto& entry : scenario_table)
    if (kind == entry.kind)
      return entry.name;
  throw std::invalid_argument("bad scenario kind");
}

ScenarioConfig parse_config(std::istream& is, std::string_view name) {
  return parse_impl(is, name, nullptr);
}

void resolve_defaults(ScenarioConfig& cfg) {
  const ScenarioKind k     = cfg.scenario;
  const bool         shell = is_shell(k);
  if (cfg.n <= 0)
    cfg.n = k == ScenarioKind::cylinder_flow ? 640 : 64;
  if (cfg.mu < 0) {
    if (shell)
      cfg.mu = cfg.gamma == 0 ? 1.0 : 0.01;
    else if (k == ScenarioKind::cylinder_flow)
      cfg.mu = 0.005;
    else
      cfg.mu = 0.01;
  }
  if (cfg.mu_e < 0)
    cfg.mu_e = shell ? 1.0 : k == ScenarioKind::soft_disc_cavity ? 0.2 : 0.0;
  if (cfg.dt_factor < 0) {
    if (shell)
      cfg.dt_factor = 0.25;
    else if (k == ScenarioKind::soft_disc_cavity)
      cfg.dt_factor = 0.125;
    else if (k == ScenarioKind::cylinder_flow)
      cfg.dt_factor = 0.1;
    else
      cfg.dt_factor = 0.25;
  }
  if (cfg.t_end < 0) {
    if (shell)
      cfg.t_end = cfg.gamma == 0 ? 3.0
                  : k == ScenarioKind::shell_anisotropic ? 0.75
                                                         : 1.25;
    else if (k == ScenarioKind::soft_disc_cavity)
      cfg.t_end = 10.0;
    else if (k == ScenarioKind::cylinder_flow)
      cfg.t_end = 100.0;
    else
      cfg.t_end = 1.0;
  }
  if (cfg.output_every <= 0) {
    if (k == ScenarioKind::soft_disc_cavity)
      cfg.output_every = 16;
    else if (k == ScenarioKind::cylinder_flow)
      cfg.output_every = 4;
    else
      cfg.output_every = 8;
  }
}

void validate_config(const ScenarioConfig& cfg) {
  const ScenarioKind k = cfg.scenario;
  if (cfg.m_fac != 1 && cfg.m_fac != 2 && cfg.m_fac != 4)
    bad("M_fac", "must be 1, 2 or 4");
  if (is_shell(k)) {
    if (cfg.n < 32 || (cfg.n & (cfg.n - 1)) != 0)
      bad("N", "must be a power of two at least 32 for shell scenarios");
    if (cfg.n % (16 * cfg.m_fac) != 0)
      bad("N", "must be divisible by 16 M_fac for the shell mesh");
    if (cfg.gamma < 0 || cfg.gamma > 0.18)
      bad("gamma", "must lie in [0, 0.18] to keep the shell in the box");
  } else if (cfg.gamma != 0) {
    bad("gamma", "only applies to shell scenarios");
  }
  if (!is_shell(k) && k != ScenarioKind::cylinder_flow) {
    if (cfg.n < 16 || cfg.n % 2 != 0)
      bad("N", "must be even and at least 16");
  }
  if (k == ScenarioKind::cylinder_flow && (cfg.n < 64 || cfg.n % 2 != 0))
    bad("N", "must be even and at least 64 for the cylinder");
  if (!(cfg.rho > 0))
    bad("rho", "must be positive");
  if (!(cfg.mu > 0))
    bad("mu", "must be positive");
  if ((is_shell(k) || k == ScenarioKind::soft_disc_cavity) && !(cfg.mu_e > 0))
    bad("mu_e", "must be positive for elastic structures");
  if (cfg.p0 < 0)
    bad("p0", "must be nonnegative");
  if (!(cfg.dt_factor > 0) || cfg.dt_factor > 1)
    bad("dt_factor", "must lie in (0, 1]");
  if (!(cfg.t_end > 0))
    bad("t_end", "must be positive");
  if (!(cfg.cfl_max > 0) || cfg.cfl_max > 1)
    bad("cfl_max", "must lie in (0, 1]");
  if (!(cfg.solver_tol > 0) || cfg.solver_tol > 1e-4)
    bad("tol", "must lie in (0, 1e-4]");
  if (!(cfg.density > 0) || cfg.density > 16)
    bad("density", "must lie in (0, 16]");
  if (!(cfg.rebuild_threshold > 0) || cfg.rebuild_threshold > 10)
    bad("rebuild_threshold", "must lie in (0, 10]");
  if (cfg.perturb_amp < 0 || cfg.perturb_amp > 1)
    bad("perturb_amp", "must lie in [0, 1]");
  if (cfg.output_every < 1)
    bad("every", "must be at least 1");
  if (cfg.output_dir.empty())
    bad("dir", "must not be empty");
  if (std::isnan(cfg.kappa) || std::isnan(cfg.eta))
    bad("kappa/eta", "must be numbers");
}

ScenarioConfig load_config(std::istream& is, std::string_view name) {
  ScenarioConfig cfg = parse_config(is, name);
  resolve_defaults(cfg);
  validate_config(cfg);
  return cfg;
}

namespace {
std::string fmt17(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
} // namespace

void write_config(std::ostream& os, const ScenarioConfig& cfg) {
  os << "[scenario]\n"
     << "kind = " << scenario_name(cfg.scenario) << "\n"
     << "N = " << cfg.n << "\n"
     << "M_fac = " << cfg.m_fac << "\n"
     << "gamma = " << fmt17(cfg.gamma) << "\n"
     << "perturb_amp = " << fmt17(cfg.perturb_amp) << "\n\n"
     << "[fluid]\n"
     << "rho = " << fmt17(cfg.rho) << "\n"
     << "mu = " << fmt17(cfg.mu) << "\n\n"
     << "[structure]\n"
     << "mu_e = " << fmt17(cfg.mu_e) << "\n"
     << "p0 = " << fmt17(cfg.p0) << "\n";
  // negative tether parameters mean "derive from the grid"; omit them so the
  // file round-trips through the nonnegativity check
  if (cfg.kappa >= 0)
    os << "kappa = " << fmt17(cfg.kappa) << "\n";
  if (cfg.eta >= 0)
    os << "eta = " << fmt17(cfg.eta) << "\n";
  os << "formulation = "
     << (cfg.formulation == Formulation::partitioned ? "partitioned"
                                                     : "unified")
     << "\n\n"
     << "[coupling]\n"
     << "kernel = " << kernel_name(cfg.kernel) << "\n"
     << "density = " << fmt17(cfg.density) << "\n"
     << "rebuild_threshold = " << fmt17(cfg.rebuild_threshold) << "\n\n"
     << "[time]\n"
     << "dt_factor = " << fmt17(cfg.dt_factor) << "\n"
     << "t_end = " << fmt17(cfg.t_end) << "\n"
     << "cfl_max = " << fmt17(cfg.cfl_max) << "\n\n"
     << "[solver]\n"
     << "tol = " << fmt17(cfg.solver_tol) << "\n\n"
     << "[output]\n"
     << "dir = " << cfg.output_dir << "\n"
     << "every = " << cfg.output_every << "\n"
     << "dump_fields = " << (cfg.dump_fields ? "true" : "false") << "\n";
}

StudyConfig load_study(std::istream& is, std::string_view name) {
  StudyConfig study;
  study.base = parse_impl(is, name, &study);
  resolve_defaults(study.base);
  if (study.n_values.empty())
    study.n_values = {study.base.n};
  if (study.m_fac_values.empty())
    study.m_fac_values = {study.base.m_fac};
  for (int n : study.n_values)
    for (int m : study.m_fac_values) {
      ScenarioConfig run = study.base;
      run.n              = n;
      run.m_fac          = m;
      validate_config(run);
    }
  return study;
}

} // namespace ibfsi
