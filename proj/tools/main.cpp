// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
  return portcheck::cli::run(std::vector<std::string>(argv, argv + argc), std::cout,
                             std::cerr);
}
