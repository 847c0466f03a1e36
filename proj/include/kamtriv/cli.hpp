// Command driver behind the `kamtriv` binary; exposed as a function so tests
// can run commands in-process.  Exit codes: 0 success, 1 invalid
// configuration or usage, 2 mathematical failure (a machine-readable
// error.json is written next to the other artifacts when possible).
#pragma once

#include <string>
#include <vector>

namespace kamtriv::cli {

int run(const std::vector<std::string>& args);  // args exclude argv[0]
int run(int argc, char** argv);

}  // namespace kamtriv::cli
