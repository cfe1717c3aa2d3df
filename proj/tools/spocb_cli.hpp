#pragma once

#include <string>
#include <vector>

namespace spocb::cli {

// Subcommands: validate, solve, bounds, sweep, example.
// Exit codes: 0 success, 1 validation/schema failure, 2 numeric failure.
int run_command(const std::vector<std::string>& args);

} // namespace spocb::cli
