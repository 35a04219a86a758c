#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace delaytherm {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Property suites covering the library's analytic guarantees: the delayed
/// exponential definition and identities, solver-versus-oracle agreement,
/// spectral formulas, projection/reconstruction, the small-delay error
/// bound, and the dependence inequality. Seeded and deterministic.
std::vector<CheckResult> run_validation_suite(std::uint64_t seed);

/// True iff every check passed.
bool all_passed(const std::vector<CheckResult>& results);

/// Plain-text report, one line per check.
std::string format_report(const std::vector<CheckResult>& results);

}  // namespace delaytherm
