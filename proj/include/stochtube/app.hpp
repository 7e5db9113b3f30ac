#pragma once

#include <ostream>

namespace stochtube {

/// Exit statuses of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

/// Runs one CLI invocation in-process. `out` receives the one-line summary,
/// `err` any diagnostics. Never throws; failures map to an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stochtube
