#pragma once

#include <iosfwd>

namespace rankaudit {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitConvergence = 4,
  kExitResource = 5,
};

/// Parses argv and runs one subcommand. Results go to `out` unless --out
/// names a directory; diagnostics go to `err` as "error[<category>]: ...".
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rankaudit
