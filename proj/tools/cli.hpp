#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blochwp::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kPrecondition = 3,
  kNumericalFailure = 4,
  kInvariantViolation = 5,
};

/// Runs the command line `args` (args[0] is the program name). Progress and
/// summaries go to `out`, diagnostics to `err`; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blochwp::cli
