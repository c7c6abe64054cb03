// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PORTCHECK_TESTS_TEST_UTIL_HPP_
#define PORTCHECK_TESTS_TEST_UTIL_HPP_

#include <initializer_list>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "portcheck/corpus.hpp"
#include "portcheck/execution.hpp"
#include "portcheck/lang.hpp"

namespace portcheck::testing {

inline std::string corpus_path(const std::string& name) {
  return std::string(PORTCHECK_CORPUS_DIR) + "/" + name;
}

inline std::shared_ptr<const PreTrace> corpus_pretrace(const std::string& name,
                                                       std::size_t which = 0) {
  return load_source(corpus_path(name)).pretraces.at(which);
}

inline std::shared_ptr<const PreTrace> pretrace_of(const std::string& text,
                                                   std::size_t which = 0) {
  auto all = extract_pretraces(parse_program(text));
  return std::make_shared<const PreTrace>(std::move(all.at(which)));
}

/// Execution from (write, read) label pairs and the mo order of the program
/// writes; initialization writes are placed first.
inline Execution make_execution(
    std::shared_ptr<const PreTrace> pt,
    std::initializer_list<std::pair<const char*, const char*>> rf,
    std::initializer_list<const char*> mo) {
  Execution e;
  e.rf = Rel(pt->size());
  for (auto [w, r] : rf) e.rf.insert(pt->index_of(w), pt->index_of(r));
  std::vector<unsigned> order;
  for (unsigned i = 0; i < pt->size(); ++i) {
    if (pt->events[i].is_init()) order.push_back(i);
  }
  for (const char* w : mo) order.push_back(pt->index_of(w));
  e.mo = order_relation(pt->size(), order);
  e.pt = std::move(pt);
  return e;
}

/// Label of the first event storing into `local`.
inline std::string label_of_local(const PreTrace& pt, const std::string& local) {
  for (const Event& e : pt.events) {
    if (e.local == local) return e.label;
  }
  return {};
}

}  // namespace portcheck::testing

#endif  // PORTCHECK_TESTS_TEST_UTIL_HPP_
