#include <iostream>
#include <string>
#include <vector>

#include "hetmpc/bench.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hetmpc::run_cli(args, std::cout, std::cerr);
}
