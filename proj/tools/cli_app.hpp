#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace streamstab::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 2,      // bad flags, unreadable or malformed inputs
  kNumericalError = 3,  // inputs parsed but violate a numerical precondition
};

/// Runs the tool with `args` (excluding the program name). CSV goes to `out`,
/// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace streamstab::cli
