// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PORTCHECK_CORPUS_HPP_
#define PORTCHECK_CORPUS_HPP_

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "portcheck/pretrace.hpp"

namespace portcheck {

struct SourceFile {
  std::string name;  // file name without directory
  std::vector<std::shared_ptr<const PreTrace>> pretraces;
};

/// `.litmus` files yield one pre-trace per branch path; `.json` files hold
/// a single pre-trace document.
SourceFile load_source(const std::filesystem::path& path);

/// Every `.litmus` and `.json` file of `dir`, sorted by file name.
std::vector<SourceFile> load_corpus(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);

}  // namespace portcheck

#endif  // PORTCHECK_CORPUS_HPP_
