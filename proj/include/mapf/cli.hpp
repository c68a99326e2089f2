#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "mapf/lacam.hpp"

namespace mapf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNoSolution = 1;
inline constexpr int kExitFailure = 2;
inline constexpr int kExitUsage = 64;

int exit_code(Status status);

/// Runs one CLI invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mapf::cli
