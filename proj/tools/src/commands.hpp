#pragma once

#include <iosfwd>

namespace fkq::cli {

enum ExitCode : int {
  kOk = 0,
  kOtherError = 1,
  kConfigError = 2,
  kVerificationFailure = 3,
  kNonConvergence = 4,
};

/// Entry point of the fkq tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fkq::cli
