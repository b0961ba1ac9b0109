// ibfsi: immersed-boundary fluid-structure benchmark driver.
//
//   ibfsi run <config>    advance one scenario, outputs under [output] dir
//   ibfsi study <study>   cross product of the [study] sweep, one child
//                         process per run, aggregated into study_summary.txt
//   ibfsi verify          fast self-checks
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure.
#include "ibfsi/scenarios.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using namespace ibfsi;

namespace {

std::string self_path(const char* argv0) {
  std::error_code ec;
  const fs::path  p = fs::read_symlink("/proc/self/exe", ec);
  return ec ? std::string(argv0) : p.string();
}

int cmd_run(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    std::cerr << "config error: cannot open '" << path << "'\n";
    return 2;
  }
  ScenarioConfig cfg;
  try {
    cfg = load_config(is, path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return run_scenario(cfg);
}

struct StudyRun {
  int         n = 0, m_fac = 0;
  int         rc = -1;
  fs::path    dir;
  std::string tag;
  std::map<std::string, std::string> report; // first token -> rest of line
};

std::map<std::string, std::string> read_report(const fs::path& p) {
  std::map<std::string, std::string> kv;
  std::ifstream is(p);
  std::string   line;
  while (std::getline(is, line)) {
    const auto sp  = line.find(' ');
    if (sp == std::string::npos || sp == 0) continue;
    kv[line.substr(0, sp)] = line.substr(sp + 1);
  }
  return kv;
}

bool report_value(const StudyRun& r, const std::string& key, Real& out) {
  const auto it = r.report.find(key);
  if (it == r.report.end()) return false;
  char*      end = nullptr;
  const Real v   = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0') return false;
  out = v;
  return true;
}

std::string fmt6(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const StudyRun* find_run(const std::vector<StudyRun>& runs, int n, int m) {
  for (const auto& r : runs)
    if (r.n == n && r.m_fac == m && r.rc == 0) return &r;
  return nullptr;
}

// pairwise observed orders from the per-run error norms (equilibrium shells)
void summarize_orders(std::ostream& os, const StudyConfig& study,
                      const std::vector<StudyRun>& runs) {
  static const char* metrics[] = {"u_l1", "u_l2", "u_linf",
                                  "p_l1", "p_l2", "p_linf"};
  std::vector<int> ns = study.n_values;
  std::sort(ns.begin(), ns.end());
  for (int m : study.m_fac_values)
    for (const char* metric : metrics)
      for (size_t i = 0; i + 1 < ns.size(); ++i) {
        if (ns[i + 1] != 2 * ns[i]) continue;
        const StudyRun* rc = find_run(runs, ns[i], m);
        const StudyRun* rf = find_run(runs, ns[i + 1], m);
        Real            ec = 0, ef = 0;
        if (!rc || !rf || !report_value(*rc, metric, ec) ||
            !report_value(*rf, metric, ef) || !(ec > 0) || !(ef > 0))
          continue;
        os << "order " << metric << " M" << m << " N" << ns[i] << "-N"
           << ns[i + 1] << " " << fmt6(std::log2(ec / ef)) << "\n";
      }
}

// self-convergence from the dumped final fields (no exact solution needed)
void summarize_richardson(std::ostream& os, const StudyConfig& study,
                          const std::vector<StudyRun>& runs) {
  auto load = [](const StudyRun& r, StaggeredField& u, CellField& p) {
    std::ifstream is(r.dir / "fields.txt");
    if (!is) throw std::runtime_error("missing " + (r.dir / "fields.txt").string());
    const auto recs = read_fields(is);
    const GridSpec g{r.n, r.n, Real(1) / r.n};
    u = to_staggered(find_record(recs, "u1"), find_record(recs, "u2"), g);
    p = to_cell(find_record(recs, "p"), g);
  };

  std::vector<int> ns = study.n_values;
  std::sort(ns.begin(), ns.end());
  for (int m : study.m_fac_values)
    for (size_t i = 0; i + 2 < ns.size(); ++i) {
      if (ns[i + 1] != 2 * ns[i] || ns[i + 2] != 4 * ns[i]) continue;
      const StudyRun* r0 = find_run(runs, ns[i], m);
      const StudyRun* r1 = find_run(runs, ns[i + 1], m);
      const StudyRun* r2 = find_run(runs, ns[i + 2], m);
      if (!r0 || !r1 || !r2) continue;
      try {
        StaggeredField u0, u1, u2;
        CellField      p0, p1, p2;
        load(*r0, u0, p0);
        load(*r1, u1, p1);
        load(*r2, u2, p2);
        const GridSpec g{r0->n, r0->n, Real(1) / r0->n};
        const auto     ou = richardson_order(u0, u1, u2, g);
        const auto     op = richardson_order(p0, p1, p2, g);
        os << "richardson u M" << m << " N" << ns[i] << "-" << ns[i + 1]
           << "-" << ns[i + 2] << " l1 " << fmt6(ou.order.l1) << " l2 "
           << fmt6(ou.order.l2) << " linf " << fmt6(ou.order.linf) << "\n";
        os << "richardson p M" << m << " N" << ns[i] << "-" << ns[i + 1]
           << "-" << ns[i + 2] << " l1 " << fmt6(op.order.l1) << " l2 "
           << fmt6(op.order.l2) << " linf " << fmt6(op.order.linf) << "\n";
      } catch (const std::exception& e) {
        os << "richardson M" << m << " N" << ns[i] << " failed: " << e.what()
           << "\n";
      }
    }
}

void write_summary(const StudyConfig& study, const std::vector<StudyRun>& runs,
                   const fs::path& out) {
  std::ofstream os(out);
  os << "study " << scenario_name(study.base.scenario) << "\n";
  os << "runs " << runs.size() << "\n";
  for (const auto& r : runs) {
    os << "run " << r.tag << " exit " << r.rc << "\n";
    for (const auto& [k, v] : r.report) os << r.tag << "." << k << " " << v << "\n";
  }
  const bool shell = study.base.scenario == ScenarioKind::shell_anisotropic ||
                     study.base.scenario == ScenarioKind::shell_orthotropic;
  if (shell && study.base.gamma == 0) summarize_orders(os, study, runs);
  if (shell && study.base.gamma > 0 && study.base.dump_fields)
    summarize_richardson(os, study, runs);
}

int cmd_study(const std::string& path, const std::string& self) {
  std::ifstream is(path);
  if (!is) {
    std::cerr << "config error: cannot open '" << path << "'\n";
    return 2;
  }
  StudyConfig study;
  try {
    study = load_study(is, path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  std::vector<StudyRun> runs;
  int                   first_fail = 0;
  for (int n : study.n_values)
    for (int m : study.m_fac_values) {
      StudyRun r;
      r.n     = n;
      r.m_fac = m;
      r.tag   = "N" + std::to_string(n) + "_M" + std::to_string(m);
      r.dir   = fs::path(study.base.output_dir) / r.tag;

      ScenarioConfig cfg = study.base;
      cfg.n              = n;
      cfg.m_fac          = m;
      cfg.output_dir     = r.dir.string();

      std::error_code ec;
      fs::create_directories(r.dir, ec);
      if (ec) {
        std::cerr << "config error: cannot create '" << r.dir.string()
                  << "': " << ec.message() << "\n";
        return 2;
      }
      const fs::path cfg_path = r.dir / "run.ini";
      {
        std::ofstream cs(cfg_path);
        write_config(cs, cfg);
        if (!cs) {
          std::cerr << "config error: cannot write '" << cfg_path.string()
                    << "'\n";
          return 2;
        }
      }

      std::cout << "study " << r.tag << "\n" << std::flush;
      const std::string cmd =
          '"' + self + "\" run \"" + cfg_path.string() + '"';
      const int status = std::system(cmd.c_str());
      r.rc = (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : 3;
      if (r.rc != 0) {
        std::cerr << "study " << r.tag << " exited with " << r.rc << "\n";
        if (first_fail == 0) first_fail = r.rc;
      } else {
        r.report = read_report(r.dir / "report.txt");
      }
      runs.push_back(std::move(r));
    }

  write_summary(study, runs,
                fs::path(study.base.output_dir) / "study_summary.txt");
  return first_fail;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"immersed-boundary fluid-structure interaction benchmarks"};
  app.require_subcommand(1);

  std::string run_path, study_path;
  CLI::App* run = app.add_subcommand("run", "run one scenario from a config");
  run->add_option("config", run_path, "configuration file")->required();
  CLI::App* study =
      app.add_subcommand("study", "run a [study] sweep in child processes");
  study->add_option("study", study_path, "study file")->required();
  app.add_subcommand("verify", "run the fast self-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (run->parsed()) return cmd_run(run_path);
  if (study->parsed()) return cmd_study(study_path, self_path(argv[0]));
  return verify_quick(std::cout) ? 0 : 3;
}
