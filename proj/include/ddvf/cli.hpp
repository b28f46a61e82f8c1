#pragma once

#include <iosfwd>

namespace ddvf {

/// Process exit codes of the command-line driver.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitSolver = 2,
    kExitIo = 3,
};

/// Full command-line driver. Messages go to `out` and `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

} // namespace ddvf
