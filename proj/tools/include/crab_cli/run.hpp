#pragma once

#include "crab_cli/config.hpp"

#include <string>

namespace crab::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kNumericFailure = 3,
  kValidationFailure = 4,
};

struct RunOutcome {
  int status = kSuccess;
  /// One-line outcome, e.g. "validation failed: positivity".
  std::string message;
};

/// Executes the configured command, writing tables, summary.json and
/// summary.txt into config.out_dir. Numeric failures also leave
/// diagnostics.txt there.
RunOutcome run(const RunConfig& config);

}  // namespace crab::cli
