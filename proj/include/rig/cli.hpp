#pragma once

#include <string>
#include <vector>

namespace rig {

// Command-line entry point, shared by the binary and the in-process tests.
// args excludes the program name. Exit codes: 0 success/pass, 2 usage or
// schema error, 3 statistical failure, 1 internal error.
int run_cli(const std::vector<std::string>& args);

}  // namespace rig
