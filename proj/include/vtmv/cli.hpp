#pragma once

#include <iosfwd>

namespace vtmv {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,
    kExitAssumption = 1,
    kExitParse = 2,
    kExitNumeric = 3,
};

/// Entry point of the `vtmv` tool:
///   vtmv <validate|frontier|solve|simulate|figures> --spec FILE [--out FILE] [flags]
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vtmv
