#pragma once

#include <string>
#include <vector>

namespace fml {

// Entry point of the command-line harness. Exit codes: 0 success / verdict
// pass, 1 verdict failure, 2 input error (including unknown flags).
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // without argv[0]

}  // namespace fml
