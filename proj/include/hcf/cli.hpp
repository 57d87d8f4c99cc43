/// @file cli.hpp
/// @brief Command-line driver. Exposed as a library call so tests can invoke
/// subcommands in-process and assert on the exit-code contract.

#pragma once

#include <string>
#include <vector>

namespace hcf {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kNumericalAbort = 3,
    kCheckFail = 4,
    kIoError = 5,
};

/// args excludes the program name, e.g. {"run", "--config", "run.cfg"}.
int run_cli(const std::vector<std::string>& args);

}  // namespace hcf
