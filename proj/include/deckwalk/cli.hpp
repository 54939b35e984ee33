#pragma once

#include <iosfwd>

namespace deckwalk {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitCapacity = 3, kExitIo = 4 };

/// Runs `deckwalk <subcommand> ...`; argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace deckwalk
