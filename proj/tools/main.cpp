#include <string>
#include <vector>

#include <CLI11.hpp>

#include "delaytherm/run.hpp"

using delaytherm::RunConfig;

int main(int argc, char** argv) {
  CLI::App app{"delaytherm: spectral solver for 1D thermoelasticity with a pure constant delay"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string tau_list_arg;

  const auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", cfg.config_path, "path to the JSON config file");
    if (config_required) opt->required();
    sub->add_option("--output", cfg.output_dir, "output directory (default: out)");
    sub->add_option("--modes", cfg.n_modes, "override run.n_modes");
    sub->add_option("--tau", cfg.tau, "override run.tau");
    sub->add_option("--t-final", cfg.horizon, "override run.horizon");
    sub->add_option("--dt", cfg.dt, "override run.dt");
    sub->add_option("--dx", cfg.dx, "override run.dx");
    sub->add_option("--tau-list", tau_list_arg, "comma-separated decreasing delays (converge)");
    sub->add_option("--format", cfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--parallel", cfg.parallel, "solve modes concurrently (identical output)");
    sub->add_option("--seed", cfg.seed, "seed for the randomized validation suites");
  };

  auto* simulate = app.add_subcommand("simulate", "solve and write the space-time fields");
  add_common(simulate, true);
  auto* modes = app.add_subcommand("modes", "write the per-mode eigenstructure table");
  add_common(modes, true);
  auto* converge = app.add_subcommand("converge", "delayed-vs-classical small-delay error study");
  add_common(converge, true);
  auto* validate = app.add_subcommand("validate", "run the property suites and report pass/fail");
  add_common(validate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints the message or the requested help text
    return rc == 0 ? 0 : delaytherm::kExitConfigError;
  }

  if (simulate->parsed()) cfg.command = RunConfig::Command::Simulate;
  if (modes->parsed()) cfg.command = RunConfig::Command::Modes;
  if (converge->parsed()) cfg.command = RunConfig::Command::Converge;
  if (validate->parsed()) cfg.command = RunConfig::Command::Validate;

  if (!tau_list_arg.empty()) {
    std::size_t pos = 0;
    while (pos < tau_list_arg.size()) {
      std::size_t next = tau_list_arg.find(',', pos);
      if (next == std::string::npos) next = tau_list_arg.size();
      try {
        cfg.tau_list.push_back(std::stod(tau_list_arg.substr(pos, next - pos)));
      } catch (const std::exception&) {
        std::fprintf(stderr, "config error: bad --tau-list entry\n");
        return delaytherm::kExitConfigError;
      }
      pos = next + 1;
    }
  }

  return delaytherm::run(cfg);
}
