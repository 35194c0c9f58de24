#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fmreg::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kOk = 0,
    kUsageError = 2,       ///< bad flags, unreadable inputs, shape mismatch
    kDegenerateError = 3,  ///< constant images, singular objectives
};

/// Parses argv (argv[0] is the program name) and runs one of
/// estimate / align / eval / synth. Normal output goes to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fmreg::cli
