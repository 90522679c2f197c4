#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tracebounds {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitRuntime = 1,
    kExitUsage = 2,
    kExitCheckFailed = 3,
    kExitIo = 4,
};

/// Runs the command line `args` (without the program name). Reports go to
/// `out` unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tracebounds
