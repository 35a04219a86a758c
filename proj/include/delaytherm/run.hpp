#pragma once

#include <string>

#include "delaytherm/config.hpp"

namespace delaytherm {

/// Exit codes of the command-line interface.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitNumericError = 3,
  kExitValidationFailure = 4,
};

/// Executes one command: reads and validates the config (when the command
/// needs one), produces the artifact files in the output directory, and
/// returns the exit code. Errors are reported on stderr; progress and
/// reports on stdout.
int run(const RunConfig& cfg);

/// Same, with the config document supplied directly (used by tests and the
/// bindings; file reading skipped).
int run_with_config_text(const RunConfig& cfg, const std::string& config_text);

/// Fixed scientific formatting with 17 significant digits; values survive
/// a text round trip exactly.
std::string format_double(double v);

/// FNV-1a 64-bit content hash, hex-encoded (used for manifest checksums).
std::string fnv1a_hex(const std::string& bytes);

}  // namespace delaytherm
