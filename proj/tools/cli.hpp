#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hyperex::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2 };

/// Runs the command line `args` (args[0] is the program name). Results go to
/// `out` unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hyperex::cli
