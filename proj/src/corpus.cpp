// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "portcheck/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "portcheck/errors.hpp"
#include "portcheck/lang.hpp"

namespace portcheck {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SourceFile load_source(const fs::path& path) {
  SourceFile f;
  f.name = path.filename().string();
  const std::string text = read_file(path);
  if (path.extension() == ".json") {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(f.name + ": " + e.what());
    }
    f.pretraces.push_back(std::make_shared<const PreTrace>(load_pretrace(doc)));
    return f;
  }
  for (PreTrace& pt : extract_pretraces(parse_program(text))) {
    f.pretraces.push_back(std::make_shared<const PreTrace>(std::move(pt)));
  }
  return f;
}

std::vector<SourceFile> load_corpus(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".litmus" || ext == ".json")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<SourceFile> out;
  for (const auto& p : files) out.push_back(load_source(p));
  return out;
}

}  // namespace portcheck
