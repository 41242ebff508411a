// Copyright 2026 The illumdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace illumdiff::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_config = 1,
  exit_io = 2,
  exit_numeric = 3,
};

/// Entry point shared by the executable and the tests. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace illumdiff::cli
