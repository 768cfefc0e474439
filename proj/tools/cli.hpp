#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mixar::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mixar::cli
