#pragma once

#include <ostream>

namespace hashq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBadInput = 3;
inline constexpr int kExitRuntime = 4;

// Parses argv and runs one subcommand. Never throws; errors become exit codes
// with a message on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hashq::cli
