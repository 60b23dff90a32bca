#pragma once

#include <string>
#include <vector>

namespace sparsepsi {

/// Exit codes shared by every subcommand.
enum ExitCode : int
{
    kExitOk = 0,
    kExitUsage = 1,        ///< bad arguments or unreadable input
    kExitNotConverged = 2, ///< fit/cv: max_iter reached; oracle-check: certificate failed
};

/// Entry point for `sparsepsi <subcommand> ...`. args[0] is the program name.
int run_cli(const std::vector<std::string>& args);

} // namespace sparsepsi
