#pragma once

#include <ostream>

namespace nib::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 1,
    kConvergenceFailure = 2,
    kLoopBoundNotFulfilled = 3,
};

/// Entry point of the `nib` tool with injectable streams.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nib::cli
