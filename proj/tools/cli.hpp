#pragma once

#include <ostream>

namespace fasthymix::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kIoError = 3,
    kNumericalError = 4,
};

/// Runs one subcommand (simulate, estimate-noise, denoise, evaluate).
/// Progress and diagnostics go to `log`; artifacts only to files.
int run(int argc, const char* const* argv, std::ostream& log);

}  // namespace fasthymix::cli
