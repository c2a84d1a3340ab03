#pragma once

#include <string>
#include <vector>

namespace ssg {

/// Exit codes of the command line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,     // I/O failure or replay mismatch
  kExitUsage = 2,
  kExitDivergence = 3,
  kExitBoundViolation = 4,
};

/// ssg solve-bvp | evolve | diagnose [options]
int cli_main(int argc, char** argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace ssg
