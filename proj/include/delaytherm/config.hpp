#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "delaytherm/core_model.hpp"

namespace delaytherm {

/// Run orchestration settings: subcommand, paths, output format and the
/// command-line overrides applied on top of the config file.
struct RunConfig {
  enum class Command { Simulate, Modes, Converge, Validate };

  Command command = Command::Simulate;
  std::string config_path;
  std::string output_dir = "out";
  std::string format = "csv";  // csv | json
  bool parallel = false;
  std::uint64_t seed = 0;

  std::optional<std::size_t> n_modes;
  std::optional<double> tau;
  std::optional<double> horizon;
  std::optional<double> dt;
  std::optional<double> dx;
  std::vector<double> tau_list;  // converge; may also come from the file
};

/// Parsed file content: the (not yet validated) problem plus file-level
/// run settings.
struct ParsedConfig {
  ProblemSpec spec;
  std::vector<double> tau_list;
  bool dx_given = false;
};

/// Parses the JSON config document. Unknown keys are rejected with their
/// dotted path; missing required keys and malformed values raise
/// ConfigError with context.
ParsedConfig parse_config(const std::string& text);

/// Applies CLI overrides onto a parsed config and validates the problem.
ProblemSpec finalize_spec(ParsedConfig parsed, const RunConfig& run);

/// Serializes the resolved problem back into config-file JSON (the shape
/// parse_config accepts). Only file-expressible data kinds are supported.
std::string spec_to_config_json(const ProblemSpec& spec, const std::vector<double>& tau_list);

}  // namespace delaytherm
