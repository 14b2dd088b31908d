#pragma once

#include <iosfwd>

namespace lvl {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitEmpty = 2,
  kExitIdentityFailure = 3,
};

/// Entry point of `lvl`; argv[0] is the program name. Structured output goes
/// to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lvl
