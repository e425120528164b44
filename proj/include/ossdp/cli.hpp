#pragma once

#include <span>
#include <string>

namespace ossdp::cli {

/// Entry point of the command-line tool. args excludes the program name.
/// Exit codes: solve maps Feasible/Infeasible/Indeterminate-or-error to
/// 0/1/2; verify maps pass/fail to 0/1; malformed arguments print usage and
/// return 2.
int run(std::span<const std::string> args);

}  // namespace ossdp::cli
