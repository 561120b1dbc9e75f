#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dlmem {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitInfeasible = 3,
    kExitRunFailed = 4,
};

/// Entry point behind the dlmem binary. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace dlmem
