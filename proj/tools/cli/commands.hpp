#pragma once

#include "cli/report.hpp"
#include "cli/scenario_file.hpp"

#include <iosfwd>

namespace cpsdiag::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitNumerical = 3,
  kExitInfeasible = 4,
};

/// Maps the in-flight exception to an exit code and writes "error: ..." to `err`.
int report_exception(std::exception_ptr error, std::ostream& err);

/// Entry point shared by main() and the CLI tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cpsdiag::cli
