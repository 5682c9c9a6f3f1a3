#pragma once

#include <ostream>
#include <string_view>

namespace g2t {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Exit codes of the command line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitDataError = 1,
    kExitContractViolation = 2,
    kExitCheckFailed = 3,  // gradcheck exceeded its tolerance
};

/// Runs `g2t <command> ...` in-process and returns the exit code.
/// Relative input paths are resolved against --data-root (env G2T_DATA_ROOT).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace g2t
