#pragma once

#include <string>
#include <vector>

namespace vdt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;    // bad arguments or unreadable input
inline constexpr int kExitRuntime = 3;  // fit failure, simulation halt, transport failure

/// Parses and runs one `vdt` subcommand. Never throws; returns the exit code.
int run(int argc, const char* const* argv);

/// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args);

} // namespace vdt::cli
