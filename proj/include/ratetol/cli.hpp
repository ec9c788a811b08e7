#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ratetol {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidInput = 2,
  kExitNonConvergence = 3,
  kExitReproductionFailed = 4,
};

// Runs one command line (without the program name). Reports go to `out`
// unless --output names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ratetol
