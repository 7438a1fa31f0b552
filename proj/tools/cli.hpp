#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace colmatch::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInput = 2,
  kExitProvider = 3,
  kExitMissing = 4,
};

// Entry point shared by the binary and the integration tests. args[0] is
// the program name. Data goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace colmatch::cli
