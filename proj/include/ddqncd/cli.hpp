#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ddqncd {

// Exit codes shared by every command.
enum ExitCode : int {
    kExitOk = 0,
    kExitVerdictFailed = 1,
    kExitMalformedInput = 2,
    kExitConfig = 3,  // invariant violation or an undefined quantity
    kExitUnwritable = 4,
};

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

// Shortest round-trip decimal; integral values keep a trailing ".0".
std::string format_number(double v);

}  // namespace ddqncd
