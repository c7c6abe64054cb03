// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PORTCHECK_TOOLS_CLI_HPP_
#define PORTCHECK_TOOLS_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace portcheck::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kViolation = 2,
  kBudget = 3,
};

/// Runs one command line (args[0] is the program name). Documents go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace portcheck::cli

#endif  // PORTCHECK_TOOLS_CLI_HPP_
