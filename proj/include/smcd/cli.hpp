#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smcd::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataFailure = 2, kNumericalFailure = 3 };

/// Runs one invocation of the command-line tool. `args` excludes the
/// program name. Written file paths go to `out`, progress and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smcd::cli
