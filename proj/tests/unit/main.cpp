// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "graphfuse/tensor.hpp"

int main(int argc, char** argv) {
  graphfuse::tune_allocator();
  doctest::Context context(argc, argv);
  return context.run();
}
