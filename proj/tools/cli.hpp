#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ddstab::cli {

/// Exit codes of the ddstab tool.
enum ExitCode : int {
  kSuccess = 0,
  kFailure = 1,
  kNegative = 2,
  kUsage = 64,
};

/// Runs the tool on `args` (without the program name). Environment overrides are read
/// through std::getenv.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ddstab::cli
