#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nmago {

/// Exit codes of the command line front end.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2 };

/// Runs `nmago <subcommand> ...`; argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace nmago
