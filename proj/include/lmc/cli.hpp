#pragma once

#include <ostream>

namespace lmc::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kDataError = 2,
  kProviderError = 3,
  kAcceptanceFailure = 4,
};

/// Entry point behind the `lmcompress` binary. Failures print a JSON error
/// object on `err` and return a non-zero exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lmc::cli
