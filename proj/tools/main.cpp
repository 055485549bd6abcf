// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "graphfuse/cli.hpp"
#include "graphfuse/tensor.hpp"

int main(int argc, char** argv) {
  graphfuse::tune_allocator();
  std::vector<std::string> args(argv + 1, argv + argc);
  return graphfuse::run_cli(args, std::cout, std::cerr);
}
