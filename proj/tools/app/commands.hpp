#pragma once

#include <iosfwd>

namespace tstruct::app {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitDiverged = 3;
inline constexpr int kExitIo = 4;

// Entry point behind the `tstruct` executable; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tstruct::app
