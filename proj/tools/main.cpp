#include <string>
#include <vector>

#include "rig/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rig::run_cli(args);
}
