// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "portcheck/pretrace.hpp"

#include <gtest/gtest.h>

#include "portcheck/errors.hpp"
#include "test_util.hpp"

namespace portcheck {
namespace {

using testing::corpus_pretrace;
using testing::pretrace_of;

bool contains(const std::vector<std::string>& report, const std::string& s) {
  for (const auto& r : report) {
    if (r.find(s) != std::string::npos) return true;
  }
  return false;
}

TEST(Validate, ReflexivePo) {
  PreTrace pt = *pretrace_of("1: x=1;");
  pt.po.insert(1, 1);
  EXPECT_TRUE(contains(validate_pretrace(pt), "po not irreflexive"));
}

TEST(Validate, TriangularRaceIsValid) {
  const auto pt = corpus_pretrace("triangular.litmus");
  EXPECT_EQ(pt->size(), 7u);
  EXPECT_TRUE(validate_pretrace(*pt).empty());
}

TEST(Validate, MissingInitialization) {
  PreTrace pt = *pretrace_of("1: a=x;");
  pt.events[0] = Event{"other", 1, Kind::Write, "z", 0, {}};
  pt.finalize();
  EXPECT_TRUE(contains(validate_pretrace(pt), "missing initialization for x"));
}

TEST(EventSets, FilterByLocation) {
  const auto pt = corpus_pretrace("triangular.litmus");
  const auto s = event_sets(*pt, "x");
  EXPECT_EQ(mask_labels(*pt, s.w), (std::vector<std::string>{"init_x", "T1..0"}));
  EXPECT_EQ(mask_labels(*pt, s.r), (std::vector<std::string>{"T2..1", "T3..0"}));
  EXPECT_EQ(s.u, 0u);
  EXPECT_THROW(event_sets(*pt, "q"), ValidationError);
}

TEST(EventSets, InitsOnly) {
  PreTrace pt = make_pretrace({Event{"init_x", 0, Kind::Write, "x", 0, {}}}, {});
  const auto s = event_sets(pt);
  EXPECT_EQ(s.r, 0u);
  EXPECT_EQ(s.u, 0u);
  EXPECT_EQ(std::popcount(s.w), 1);
}

TEST(EventSets, UpdateIsReadAndWrite) {
  const auto pt = pretrace_of("1: rmw(x,a,1);");
  const auto s = event_sets(*pt);
  const unsigned u = pt->index_of("T1..0");
  EXPECT_EQ(s.u, bit(u));
  EXPECT_TRUE(s.w & bit(u));
  EXPECT_TRUE(s.r & bit(u));
}

TEST(Document, MinimalWrite) {
  const auto doc = nlohmann::json::parse(
      R"({"events":[{"label":"w","tid":1,"kind":"W","loc":"x","val":1}],"po":[]})");
  const PreTrace pt = load_pretrace(doc);
  EXPECT_EQ(pt.size(), 2u);
  EXPECT_TRUE(pt.find("init_x").has_value());
  EXPECT_TRUE(validate_pretrace(pt).empty());
}

TEST(Document, CrossThreadPo) {
  const auto pt = corpus_pretrace("spin_exit.inlined.pretrace.json");
  const unsigned y = pt->index_of("T3..0");
  EXPECT_TRUE(pt->po.contains(y, pt->index_of("T4..0")));
  EXPECT_TRUE(pt->po.contains(y, pt->index_of("T4..1")));
  EXPECT_NE(pt->events[y].tid, pt->events[pt->index_of("T4..0")].tid);
}

TEST(Document, PoCycleRejected) {
  const auto doc = nlohmann::json::parse(R"({"events":[
      {"label":"a","tid":1,"kind":"W","loc":"x","val":1},
      {"label":"b","tid":1,"kind":"R","loc":"x"}],
      "po":[["a","b"],["b","a"]]})");
  EXPECT_THROW(load_pretrace(doc), ValidationError);
}

TEST(Document, DanglingLabelRejected) {
  const auto doc = nlohmann::json::parse(R"({"events":[
      {"label":"a","tid":1,"kind":"W","loc":"x","val":1}],
      "po":[["a","zz"]]})");
  EXPECT_THROW(load_pretrace(doc), ValidationError);
}

TEST(Document, SchemaViolations) {
  EXPECT_THROW(load_pretrace(nlohmann::json::parse(R"({"po":[]})")),
               ValidationError);
  EXPECT_THROW(load_pretrace(nlohmann::json::parse(
                   R"({"events":[{"label":"a","tid":1,"kind":"Q","loc":"x"}]})")),
               ValidationError);
  EXPECT_THROW(load_pretrace(nlohmann::json::parse(
                   R"({"events":[{"label":"a","tid":1,"kind":"W","loc":"x"}]})")),
               ValidationError);
}

TEST(Document, RoundTripOverCorpus) {
  for (const auto& file : load_corpus(PORTCHECK_CORPUS_DIR)) {
    for (const auto& pt : file.pretraces) {
      const PreTrace back = load_pretrace(store_pretrace(*pt));
      EXPECT_EQ(back.events, pt->events) << file.name;
      EXPECT_EQ(back.po, pt->po) << file.name;
      EXPECT_EQ(tclosure(pt->po), pt->po) << file.name;
    }
  }
}

TEST(Document, ProgramDerivedAreThreadTotal) {
  for (const auto& file : load_corpus(PORTCHECK_CORPUS_DIR)) {
    if (file.name.ends_with(".json")) continue;
    for (const auto& pt : file.pretraces) EXPECT_TRUE(thread_total(*pt)) << file.name;
  }
}

}  // namespace
}  // namespace portcheck
