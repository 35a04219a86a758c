#include "delaytherm/run.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "delaytherm/thermo_solver.hpp"
#include "delaytherm/validation.hpp"

namespace delaytherm {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct Artifacts {
  // name -> content, in emission order
  std::vector<std::pair<std::string, std::string>> files;
  void add(std::string name, std::string content) {
    files.emplace_back(std::move(name), std::move(content));
  }
};

void write_artifacts(const Artifacts& artifacts, const std::string& dir) {
  fs::create_directories(dir);
  for (const auto& [name, content] : artifacts.files) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw InputError("output directory is not writable: " + dir);
    out << content;
  }
}

json manifest_base(const RunConfig& cfg, const ProblemSpec& spec,
                   const std::vector<double>& tau_list) {
  json m;
  m["tool"] = "delaytherm";
  m["version"] = "0.1.0";
  m["command"] = cfg.command == RunConfig::Command::Simulate   ? "simulate"
                 : cfg.command == RunConfig::Command::Modes    ? "modes"
                 : cfg.command == RunConfig::Command::Converge ? "converge"
                                                               : "validate";
  m["format"] = cfg.format;
  m["parallel"] = cfg.parallel;
  m["seed"] = cfg.seed;
  m["config"] = json::parse(spec_to_config_json(spec, tau_list));
  return m;
}

std::string manifest_with_checksums(json manifest, const Artifacts& artifacts) {
  json sums = json::object();
  for (const auto& [name, content] : artifacts.files) {
    sums[name] = "fnv1a:" + fnv1a_hex(content);
  }
  manifest["outputs"] = sums;
  return manifest.dump(2) + "\n";
}

struct SolvedProblem {
  Basis basis;
  ModalData data;
  std::vector<ModalSystem> systems;
  std::vector<double> t_grid;
  std::vector<double> x_grid;
  std::vector<Trajectory> trajectories;
};

SolvedProblem solve_problem(const ProblemSpec& spec, bool parallel) {
  SolvedProblem sp{Basis(spec.physical.l, spec.coeffs), {}, {}, {}, {}, {}};
  sp.data = project_data(spec, sp.basis);
  sp.systems.reserve(spec.n_modes);
  for (std::size_t n = 0; n < spec.n_modes; ++n) {
    sp.systems.push_back(build_modal_system(n, spec.coeffs, spec.physical.l));
  }
  const double dt = resolved_dt(spec);
  const std::size_t steps = static_cast<std::size_t>(std::ceil(spec.horizon / dt - 1e-9));
  sp.t_grid = uniform_grid(0.0, spec.horizon, steps + 1);
  sp.x_grid = uniform_grid(0.0, spec.physical.l, spec.grids.n_x);

  sp.trajectories.resize(spec.n_modes);
  if (parallel) {
    std::vector<std::future<Trajectory>> futures(spec.n_modes);
    for (std::size_t n = 0; n < spec.n_modes; ++n) {
      futures[n] = std::async(std::launch::async, [&, n] {
        return solve_mode(sp.systems[n], sp.data, sp.t_grid, spec.horizon);
      });
    }
    for (std::size_t n = 0; n < spec.n_modes; ++n) sp.trajectories[n] = futures[n].get();
  } else {
    for (std::size_t n = 0; n < spec.n_modes; ++n) {
      sp.trajectories[n] = solve_mode(sp.systems[n], sp.data, sp.t_grid, spec.horizon);
    }
  }
  return sp;
}

std::string field_csv(const FieldSolution& field) {
  std::ostringstream os;
  os << "t,x,V1,V2,V3,u,theta\n";
  for (std::size_t j = 0; j < field.t_grid.size(); ++j) {
    for (std::size_t i = 0; i < field.x_grid.size(); ++i) {
      os << format_double(field.t_grid[j]) << ',' << format_double(field.x_grid[i]) << ','
         << format_double(field.V[j][i][0]) << ',' << format_double(field.V[j][i][1]) << ','
         << format_double(field.V[j][i][2]) << ',' << format_double(field.u[j][i]) << ','
         << format_double(field.theta[j][i]) << '\n';
    }
  }
  return os.str();
}

std::string field_json(const FieldSolution& field) {
  json doc;
  doc["t"] = json::array();
  for (double t : field.t_grid) doc["t"].push_back(format_double(t));
  doc["x"] = json::array();
  for (double x : field.x_grid) doc["x"].push_back(format_double(x));
  json rows = json::array();
  for (std::size_t j = 0; j < field.t_grid.size(); ++j) {
    json row = json::array();
    for (std::size_t i = 0; i < field.x_grid.size(); ++i) {
      row.push_back({format_double(field.V[j][i][0]), format_double(field.V[j][i][1]),
                     format_double(field.V[j][i][2]), format_double(field.u[j][i]),
                     format_double(field.theta[j][i])});
    }
    rows.push_back(row);
  }
  doc["fields"] = rows;
  doc["columns"] = {"V1", "V2", "V3", "u", "theta"};
  return doc.dump(2) + "\n";
}

int run_simulate(const RunConfig& cfg, const ProblemSpec& spec,
                 const std::vector<double>& tau_list) {
  const SolvedProblem sp = solve_problem(spec, cfg.parallel);
  const FieldSolution field =
      reconstruct(spec, sp.basis, sp.data, sp.trajectories, sp.x_grid, sp.t_grid);
  Artifacts artifacts;
  if (cfg.format == "json") {
    artifacts.add("field.json", field_json(field));
  } else {
    artifacts.add("field.csv", field_csv(field));
  }
  const std::string manifest = manifest_with_checksums(manifest_base(cfg, spec, tau_list),
                                                       artifacts);
  artifacts.add("manifest.json", manifest);
  write_artifacts(artifacts, cfg.output_dir);
  std::cout << "simulate: " << field.t_grid.size() << " x " << field.x_grid.size()
            << " samples written to " << cfg.output_dir << "\n";
  return kExitOk;
}

int run_modes(const RunConfig& cfg, const ProblemSpec& spec,
              const std::vector<double>& tau_list) {
  std::vector<ModalSystem> systems;
  for (std::size_t n = 0; n < spec.n_modes; ++n) {
    systems.push_back(build_modal_system(n, spec.coeffs, spec.physical.l));
  }
  Artifacts artifacts;
  if (cfg.format == "json") {
    json rows = json::array();
    for (const auto& sys : systems) {
      rows.push_back({{"n", sys.n},
                      {"nu", format_double(sys.nu)},
                      {"eigenvalues",
                       {{format_double(sys.eigenvalues[0].real()),
                         format_double(sys.eigenvalues[0].imag())},
                        {format_double(sys.eigenvalues[1].real()),
                         format_double(sys.eigenvalues[1].imag())},
                        {format_double(sys.eigenvalues[2].real()),
                         format_double(sys.eigenvalues[2].imag())}}},
                      {"diagonalizable", sys.diagonalizable},
                      {"cond_S", format_double(sys.cond_S)}});
    }
    artifacts.add("modes.json", json{{"modes", rows}}.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "n,nu,re_mu1,im_mu1,re_mu2,im_mu2,re_mu3,im_mu3,diagonalizable,cond_S\n";
    for (const auto& sys : systems) {
      os << sys.n << ',' << format_double(sys.nu);
      for (const auto& mu : sys.eigenvalues) {
        os << ',' << format_double(mu.real()) << ',' << format_double(mu.imag());
      }
      os << ',' << (sys.diagonalizable ? 1 : 0) << ',' << format_double(sys.cond_S) << '\n';
    }
    artifacts.add("modes.csv", os.str());
  }
  const std::string manifest = manifest_with_checksums(manifest_base(cfg, spec, tau_list),
                                                       artifacts);
  artifacts.add("manifest.json", manifest);
  write_artifacts(artifacts, cfg.output_dir);
  std::cout << "modes: " << spec.n_modes << " rows written to " << cfg.output_dir << "\n";
  return kExitOk;
}

int run_converge(const RunConfig& cfg, const ProblemSpec& spec, std::vector<double> tau_list) {
  if (!cfg.tau_list.empty()) tau_list = cfg.tau_list;
  if (tau_list.empty()) throw ConfigError("converge needs a tau list (--tau-list or run.tau_list)");
  for (std::size_t i = 1; i < tau_list.size(); ++i) {
    if (!(tau_list[i] < tau_list[i - 1])) throw ConfigError("tau_list must be strictly decreasing");
  }
  const ConvergenceReport report = convergence_study(spec, tau_list);

  Artifacts artifacts;
  json summary;
  summary["slope"] = report.slope_defined ? json(format_double(report.slope)) : json(nullptr);
  summary["slope_defined"] = report.slope_defined;
  if (cfg.format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < report.taus.size(); ++i) {
      rows.push_back({{"tau", format_double(report.taus[i])},
                      {"sup_error", format_double(report.sup_errors[i])},
                      {"bound", format_double(report.bounds[i])},
                      {"bound_satisfied", static_cast<bool>(report.bound_satisfied[i])}});
    }
    artifacts.add("convergence.json",
                  json{{"rows", rows}, {"summary", summary}}.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "tau,sup_error,bound,bound_satisfied\n";
    for (std::size_t i = 0; i < report.taus.size(); ++i) {
      os << format_double(report.taus[i]) << ',' << format_double(report.sup_errors[i]) << ','
         << format_double(report.bounds[i]) << ',' << (report.bound_satisfied[i] ? 1 : 0) << '\n';
    }
    artifacts.add("convergence.csv", os.str());

    std::ostringstream pm;
    pm << "tau,n,sup_error\n";
    for (std::size_t i = 0; i < report.taus.size(); ++i) {
      for (std::size_t n = 0; n < report.per_mode[i].size(); ++n) {
        pm << format_double(report.taus[i]) << ',' << n << ','
           << format_double(report.per_mode[i][n]) << '\n';
      }
    }
    artifacts.add("convergence_modes.csv", pm.str());
  }
  json manifest = manifest_base(cfg, spec, tau_list);
  manifest["summary"] = summary;
  artifacts.add("manifest.json", manifest_with_checksums(manifest, artifacts));
  write_artifacts(artifacts, cfg.output_dir);
  if (report.slope_defined) {
    std::cout << "converge: fitted slope " << format_double(report.slope) << "\n";
  } else {
    std::cout << "converge: slope undefined (degenerate error decay)\n";
  }
  return kExitOk;
}

int run_validate(const RunConfig& cfg) {
  const auto results = run_validation_suite(cfg.seed);
  const std::string report = format_report(results);
  std::cout << report;
  Artifacts artifacts;
  json doc;
  doc["seed"] = cfg.seed;
  json rows = json::array();
  for (const auto& r : results) {
    rows.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  }
  doc["checks"] = rows;
  doc["all_passed"] = all_passed(results);
  artifacts.add("validation_report.json", doc.dump(2) + "\n");
  write_artifacts(artifacts, cfg.output_dir);
  return all_passed(results) ? kExitOk : kExitValidationFailure;
}

int dispatch(const RunConfig& cfg, const ParsedConfig* parsed) {
  if (cfg.command == RunConfig::Command::Validate) return run_validate(cfg);
  if (parsed == nullptr) throw ConfigError("this command requires --config");
  const ProblemSpec spec = finalize_spec(*parsed, cfg);
  switch (cfg.command) {
    case RunConfig::Command::Simulate:
      return run_simulate(cfg, spec, parsed->tau_list);
    case RunConfig::Command::Modes:
      return run_modes(cfg, spec, parsed->tau_list);
    case RunConfig::Command::Converge:
      return run_converge(cfg, spec, parsed->tau_list);
    default:
      return kExitConfigError;
  }
}

int guarded(const RunConfig& cfg, const ParsedConfig* parsed) {
  try {
    return dispatch(cfg, parsed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumericError;
  }
}

}  // namespace

int run(const RunConfig& cfg) {
  if (cfg.command == RunConfig::Command::Validate && cfg.config_path.empty()) {
    return guarded(cfg, nullptr);
  }
  std::ifstream in(cfg.config_path, std::ios::binary);
  if (!in) {
    std::cerr << "config error: cannot read config file: " << cfg.config_path << "\n";
    return kExitConfigError;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return run_with_config_text(cfg, buffer.str());
}

int run_with_config_text(const RunConfig& cfg, const std::string& config_text) {
  if (cfg.command == RunConfig::Command::Validate) {
    return guarded(cfg, nullptr);
  }
  try {
    const ParsedConfig parsed = parse_config(config_text);
    return guarded(cfg, &parsed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace delaytherm
