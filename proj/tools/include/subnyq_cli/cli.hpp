#pragma once

#include <iostream>

namespace subnyq::cli {

/// Exit codes of the workbench.
enum ExitCode : int { ok = 0, config_error = 1, runtime_error = 2, io_error = 3 };

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr);

}  // namespace subnyq::cli
