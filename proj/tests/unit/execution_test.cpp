// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "portcheck/execution.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "portcheck/errors.hpp"
#include "test_util.hpp"

namespace portcheck {
namespace {

using testing::corpus_pretrace;
using testing::make_execution;
using testing::pretrace_of;

// Independent count: each read picks a same-location write other than
// itself, and the program writes are ordered freely after the inits.
std::uint64_t brute_count(const PreTrace& pt) {
  std::uint64_t n = 1;
  unsigned program_writes = 0;
  for (unsigned r = 0; r < pt.size(); ++r) {
    const Event& e = pt.events[r];
    if (e.is_write() && !e.is_init()) ++program_writes;
    if (!e.is_read()) continue;
    std::uint64_t k = 0;
    for (unsigned w = 0; w < pt.size(); ++w) {
      if (w != r && pt.events[w].is_write() && pt.events[w].loc == e.loc) ++k;
    }
    n *= k;
  }
  for (unsigned i = 2; i <= program_writes; ++i) n *= i;
  return n;
}

TEST(Enumerate, TriangularRaceHasSixteen) {
  const auto pt = corpus_pretrace("triangular.litmus");
  EXPECT_EQ(candidate_count(*pt), 16u);
  EXPECT_EQ(enumerate_candidates(pt).size(), 16u);
}

TEST(Enumerate, CountsMatchClosedFormOverCorpus) {
  for (const auto& file : load_corpus(PORTCHECK_CORPUS_DIR)) {
    for (const auto& pt : file.pretraces) {
      std::uint64_t n = 0;
      std::set<std::pair<std::vector<std::pair<unsigned, unsigned>>,
                         std::vector<std::pair<unsigned, unsigned>>>>
          distinct;
      for_each_candidate(pt, [&](const Execution& e) {
        ++n;
        EXPECT_TRUE(validate_execution(e).empty()) << file.name;
        if (n <= 2000) distinct.emplace(e.rf.pairs(), e.mo.pairs());
      });
      EXPECT_EQ(n, brute_count(*pt)) << file.name;
      EXPECT_EQ(n, candidate_count(*pt)) << file.name;
      EXPECT_EQ(distinct.size(), std::min<std::uint64_t>(n, 2000)) << file.name;
    }
  }
}

TEST(Enumerate, InitsFormMoPrefix) {
  const auto pt = corpus_pretrace("2+2w.litmus");
  for_each_candidate(pt, [&](const Execution& e) {
    for (unsigned i = 0; i < pt->size(); ++i) {
      if (!pt->events[i].is_init()) continue;
      EXPECT_EQ(pt->writes & ~pt->inits & ~e.mo.row(i), 0u);
      EXPECT_EQ(e.mo.column(i) & ~pt->inits, 0u);
    }
  });
}

TEST(Enumerate, UpdatesNeverReadThemselves) {
  const auto pt = corpus_pretrace("two_updates.litmus");
  for_each_candidate(pt, [&](const Execution& e) {
    EXPECT_TRUE(is_irreflexive(e.rf));
  });
}

TEST(Enumerate, CapIsEnforced) {
  const auto pt = corpus_pretrace("updates3.litmus");
  EXPECT_THROW(CandidateStream(pt, EnumOptions{4}), CapExceeded);
}

TEST(Enumerate, OrderIsDeterministic) {
  const auto pt = corpus_pretrace("mp.litmus");
  const auto a = enumerate_candidates(pt);
  const auto b = enumerate_candidates(pt);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].rf, b[i].rf);
    EXPECT_EQ(a[i].mo, b[i].mo);
  }
}

TEST(CompleteMo, EmptyPartial) {
  const auto pt = pretrace_of("1: x=1;\n2: x=2;");
  const Rel mo = complete_mo(*pt, Rel(pt->size()));
  const Execution e{pt, Rel(pt->size()), mo};
  std::vector<std::string> labels;
  for (unsigned w : mo_order(e)) labels.push_back(pt->events[w].label);
  EXPECT_EQ(labels, (std::vector<std::string>{"init_x", "T1..0", "T2..0"}));
}

TEST(CompleteMo, RespectsPartial) {
  const auto pt = pretrace_of("1: x=1;\n2: x=2;");
  Rel partial(pt->size());
  partial.insert(pt->index_of("T2..0"), pt->index_of("T1..0"));
  const Rel mo = complete_mo(*pt, partial);
  EXPECT_TRUE(mo.contains(pt->index_of("T2..0"), pt->index_of("T1..0")));
}

TEST(CompleteMo, RejectsConflicts) {
  const auto pt = pretrace_of("1: x=1; y=1;\n2: a=x;");
  Rel against_po(pt->size());
  against_po.insert(pt->index_of("T1..1"), pt->index_of("T1..0"));
  EXPECT_THROW(complete_mo(*pt, against_po), PreconditionError);
  Rel non_write(pt->size());
  non_write.insert(pt->index_of("T1..0"), pt->index_of("T2..0"));
  EXPECT_THROW(complete_mo(*pt, non_write), PreconditionError);
}

TEST(CompleteMo, RandomPartialsExtendToTotalOrders) {
  const auto pt = corpus_pretrace("2+2w.litmus");
  std::mt19937 rng(7);
  std::vector<unsigned> writes;
  for (unsigned i = 0; i < pt->size(); ++i) {
    if (pt->events[i].is_write()) writes.push_back(i);
  }
  const Rel po_w = restrict(pt->po, pt->writes);
  for (int rep = 0; rep < 200; ++rep) {
    // A random sub-order of a random linear order.
    std::vector<unsigned> lin = writes;
    std::shuffle(lin.begin(), lin.end(), rng);
    Rel partial(pt->size());
    for (std::size_t i = 0; i < lin.size(); ++i) {
      for (std::size_t j = i + 1; j < lin.size(); ++j) {
        if (rng() % 3 == 0) partial.insert(lin[i], lin[j]);
      }
    }
    Rel mo(pt->size());
    try {
      mo = complete_mo(*pt, partial);
    } catch (const PreconditionError&) {
      EXPECT_FALSE(is_irreflexive(tclosure(tclosure(partial) | po_w)));
      continue;
    }
    EXPECT_TRUE(is_strict_total_on(mo, pt->writes));
    EXPECT_EQ(partial - mo, Rel(pt->size()));
    EXPECT_TRUE(is_irreflexive(compose(mo, po_w)));
  }
}

TEST(Behavior, ObservedFromRfAndFinalWrites) {
  const auto pt = corpus_pretrace("mp.litmus");
  const Execution e = make_execution(
      pt, {{"T1..1", "T2..0"}, {"init_x", "T2..1"}}, {"T1..0", "T1..1"});
  const Behavior b = observable_behavior(e);
  EXPECT_EQ(b.rf.size(), 2u);
  EXPECT_EQ(b.final_writes.at("x"), "T1..0");
  EXPECT_EQ(b.final_writes.at("y"), "T1..1");
  EXPECT_EQ(read_value(e, pt->index_of("T2..0")), 1);
  EXPECT_EQ(read_value(e, pt->index_of("T2..1")), 0);
  const auto doc = store_behavior(b);
  EXPECT_EQ(doc["final"]["x"], "T1..0");
}

TEST(Behavior, EquivalenceOnSharedLabels) {
  const auto p = corpus_pretrace("spin_exit.litmus");
  const auto p2 = corpus_pretrace("spin_exit.forwarded.pretrace.json");
  const Execution a = make_execution(
      p, {{"T3..0", "T4..0"}, {"init_x", "T4..1"}}, {"T3..0"});
  const Execution b = make_execution(p2, {{"init_x", "T4..1"}}, {"T3..0"});
  EXPECT_TRUE(behavior_equiv(a, b));
  const Execution c = make_execution(
      p, {{"init_y", "T4..0"}, {"init_x", "T4..1"}}, {"T3..0"});
  EXPECT_FALSE(behavior_equiv(a, c));
}

TEST(Document, ExecutionRoundTrip) {
  const auto pt = corpus_pretrace("iriw.litmus");
  for_each_candidate(pt, [&](const Execution& e) {
    const Execution back = load_execution(nlohmann::json::parse(store_execution(e).dump()));
    EXPECT_EQ(back.rf, e.rf);
    EXPECT_EQ(back.mo, e.mo);
  });
}

TEST(Document, InvalidExecutionRejected) {
  const auto doc = nlohmann::json::parse(R"({"events":[
      {"label":"w","tid":1,"kind":"W","loc":"x","val":1},
      {"label":"r","tid":2,"kind":"R","loc":"x"}],
      "po":[], "rf":[], "mo":["w"]})");
  EXPECT_THROW(load_execution(doc), ValidationError);
}

}  // namespace
}  // namespace portcheck
