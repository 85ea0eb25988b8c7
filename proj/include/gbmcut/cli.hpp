#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gbmcut {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitSeedOutOfBounds = 4;

// Entry point behind the `gbmcut` executable. `args` excludes the program
// name. Subcommands: segment, evaluate, phantom, solve-dimacs.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gbmcut
