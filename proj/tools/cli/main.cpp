// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return illumdiff::cli::run_cli(args, std::cout, std::cerr);
}
