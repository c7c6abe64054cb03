// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "portcheck/effects.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "portcheck/errors.hpp"
#include "portcheck/models.hpp"
#include "test_util.hpp"

namespace portcheck {
namespace {

using testing::corpus_pretrace;
using testing::make_execution;
using testing::pretrace_of;

using Pairs = std::vector<LabelPair>;

bool has_pair(const Pairs& v, const char* a, const char* b) {
  return std::find(v.begin(), v.end(), LabelPair{a, b}) != v.end();
}

// Safety straight from the definition: pairwise behavior_equiv.
bool naive_safe(const std::shared_ptr<const PreTrace>& p,
                const std::shared_ptr<const PreTrace>& p2, ModelId m) {
  const auto src = consistent_set(p, m);
  for (const Execution& e2 : consistent_set(p2, m)) {
    bool matched = false;
    for (const Execution& e : src) {
      if (behavior_equiv(e, e2)) {
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

std::shared_ptr<const PreTrace> edit_po(
    const PreTrace& p, const std::vector<std::pair<const char*, const char*>>& po,
    const std::vector<const char*>& drop = {}) {
  std::vector<Event> events;
  for (const Event& e : p.events) {
    if (std::find(drop.begin(), drop.end(), e.label) == drop.end()) events.push_back(e);
  }
  auto index = [&](const char* l) {
    for (unsigned i = 0; i < events.size(); ++i) {
      if (events[i].label == l) return i;
    }
    throw std::out_of_range(l);
  };
  std::vector<std::pair<unsigned, unsigned>> pairs;
  for (auto [a, b] : po) pairs.emplace_back(index(a), index(b));
  return std::make_shared<const PreTrace>(make_pretrace(events, pairs));
}

TEST(Diff, InliningAddsCrossThreadPo) {
  const auto p = corpus_pretrace("spin_exit.litmus");
  const auto p2 = corpus_pretrace("spin_exit.inlined.pretrace.json");
  const Effect eff = diff_effect(*p, *p2);
  EXPECT_EQ(eff.st_minus, 0u);
  EXPECT_EQ(eff.st_plus, 0u);
  const Pairs plus = eff.label_pairs(eff.po_plus);
  EXPECT_TRUE(has_pair(plus, "T3..0", "T4..0"));
  EXPECT_TRUE(has_pair(plus, "T3..0", "T4..1"));
}

TEST(Diff, ReadEliminationAfterInlining) {
  const auto p = corpus_pretrace("spin_exit.inlined.pretrace.json");
  const auto p2 = corpus_pretrace("spin_exit.forwarded.pretrace.json");
  const Effect eff = diff_effect(*p, *p2);
  EXPECT_EQ(eff.labels(eff.st_minus), std::vector<std::string>{"T4..0"});
  const Pairs minus = eff.label_pairs(eff.po_minus);
  EXPECT_TRUE(has_pair(minus, "T3..0", "T4..0"));
  EXPECT_TRUE(has_pair(minus, "T4..0", "T4..1"));
}

TEST(Diff, IdentityIsEmpty) {
  const auto p = corpus_pretrace("spin_inline.litmus");
  const Effect eff = diff_effect(*p, *p);
  EXPECT_EQ(eff.st_minus | eff.st_plus, 0u);
  EXPECT_TRUE(eff.po_minus.empty());
  EXPECT_TRUE(eff.po_plus.empty());
}

TEST(Diff, IncompatibleLabelRejected) {
  const auto p = pretrace_of("1: x=1;");
  const auto p2 = pretrace_of("1: x=2;");
  EXPECT_THROW(diff_effect(*p, *p2), ValidationError);
  const auto p3 = pretrace_of("1: a=x;");
  EXPECT_THROW(diff_effect(*p, *p3), ValidationError);
}

TEST(Classify, PrologueInliningIsTuwri) {
  const auto p = corpus_pretrace("spin_inline.litmus");
  const auto p2 = corpus_pretrace("spin_inline.inlined.pretrace.json");
  const EffectClass c = classify_effect(*p, *p2);
  EXPECT_FALSE(c.wi);
  EXPECT_FALSE(c.we);
  ASSERT_TRUE(c.tuwri);
  const TuwriWitness expected{"T3..0", "T4..0", "T4..1", "T2..0", 1};
  EXPECT_NE(std::find(c.tuwri_witnesses.begin(), c.tuwri_witnesses.end(), expected),
            c.tuwri_witnesses.end());
}

TEST(Classify, ForwardedReadEliminationIsBenign) {
  const auto p = corpus_pretrace("spin_exit.inlined.pretrace.json");
  const auto p2 = corpus_pretrace("spin_exit.forwarded.pretrace.json");
  const EffectClass c = classify_effect(*p, *p2);
  EXPECT_FALSE(c.wi);
  EXPECT_FALSE(c.we);
  EXPECT_FALSE(c.tuwri);
}

TEST(Classify, IntroducedAndEliminatedWrites) {
  const auto p = pretrace_of("1: x=1;\n2: a=x;");
  const auto p2 = pretrace_of("1: x=1; y=1;\n2: a=x;");
  EXPECT_TRUE(classify_effect(*p, *p2).wi);
  EXPECT_FALSE(classify_effect(*p, *p2).we);
  EXPECT_TRUE(classify_effect(*p2, *p).we);
  // A read at a fresh location materializes init_z, which is not a write
  // introduction.
  const auto p3 = pretrace_of("1: x=1;\n2: a=x; b=z;");
  EXPECT_FALSE(classify_effect(*p, *p3).wi);
}

TEST(Classify, DeorderingFlags) {
  const auto p = pretrace_of("1: x=1; y=1; a=y; b=x; x=2;");
  // Swap x=1 / y=1.
  auto ww = edit_po(*p, {{"T1..1", "T1..0"}, {"T1..0", "T1..2"}, {"T1..2", "T1..3"},
                         {"T1..3", "T1..4"}});
  EffectClass c = classify_effect(*p, *ww);
  EXPECT_TRUE(c.ww_deord);
  EXPECT_TRUE(has_pair(c.ww_pairs, "T1..0", "T1..1"));
  EXPECT_FALSE(c.same_loc_wr_deord);
  // Swap y=1 / a=y.
  auto wr = edit_po(*p, {{"T1..0", "T1..2"}, {"T1..2", "T1..1"}, {"T1..1", "T1..3"},
                         {"T1..3", "T1..4"}});
  c = classify_effect(*p, *wr);
  EXPECT_TRUE(c.same_loc_wr_deord);
  EXPECT_FALSE(c.ww_deord);
  // Swap b=x / x=2.
  auto rw = edit_po(*p, {{"T1..0", "T1..1"}, {"T1..1", "T1..2"}, {"T1..2", "T1..4"},
                         {"T1..4", "T1..3"}});
  c = classify_effect(*p, *rw);
  EXPECT_TRUE(c.same_loc_rw_deord);
  // Eliminating a write is not a de-ordering.
  auto el = edit_po(*p, {{"T1..0", "T1..2"}, {"T1..2", "T1..3"}, {"T1..3", "T1..4"}},
                    {"T1..1"});
  c = classify_effect(*p, *el);
  EXPECT_TRUE(c.we);
  EXPECT_FALSE(c.same_loc_wr_deord);
}

TEST(Safety, PrologueInliningSafeUnderScOnly) {
  const auto p = corpus_pretrace("spin_inline.litmus");
  const auto p2 = corpus_pretrace("spin_inline.inlined.pretrace.json");
  EXPECT_TRUE(is_safe_effect(p, p2, ModelId::SC).safe);
  const SafetyResult tso = is_safe_effect(p, p2, ModelId::TSO);
  ASSERT_FALSE(tso.safe);
  ASSERT_TRUE(tso.counterexample.has_value());
  EXPECT_TRUE(is_consistent(*tso.counterexample, ModelId::TSO));
  // a=1, b=0, c=1, d=0 separates the two sides.
  auto outcome = [](const Execution& e) {
    const PreTrace& t = *e.pt;
    return read_value(e, t.index_of("T1..0")) == 1 &&
           read_value(e, t.index_of("T1..1")) == 0 &&
           read_value(e, t.index_of("T4..0")) == 1 &&
           read_value(e, t.index_of("T4..1")) == 0;
  };
  for (ModelId m : {ModelId::SC, ModelId::TSO}) {
    EXPECT_FALSE(find_consistent(p, m, outcome).has_value());
  }
  EXPECT_FALSE(find_consistent(p2, ModelId::SC, outcome).has_value());
  EXPECT_TRUE(find_consistent(p2, ModelId::TSO, outcome).has_value());
}

TEST(Safety, IdentityIsSafe) {
  const auto p = corpus_pretrace("iriw.litmus");
  for (ModelId m : kAllModels) EXPECT_TRUE(is_safe_effect(p, p, m).safe);
}

TEST(Safety, AgreesWithPairwiseDefinition) {
  std::vector<std::pair<std::shared_ptr<const PreTrace>, std::shared_ptr<const PreTrace>>>
      pairs = {
          {corpus_pretrace("spin_inline.litmus"), corpus_pretrace("spin_inline.inlined.pretrace.json")},
          {corpus_pretrace("spin_exit.litmus"), corpus_pretrace("spin_exit.inlined.pretrace.json")},
          {corpus_pretrace("spin_exit.inlined.pretrace.json"),
           corpus_pretrace("spin_exit.forwarded.pretrace.json")},
      };
  // Swaps keep labels, so they are built by editing po.
  const auto sb = corpus_pretrace("sb.litmus");
  pairs.emplace_back(sb, edit_po(*sb, {{"T1..1", "T1..0"}, {"T2..0", "T2..1"}}));
  const auto mp = corpus_pretrace("mp.litmus");
  pairs.emplace_back(mp, edit_po(*mp, {{"T1..1", "T1..0"}, {"T2..0", "T2..1"}}));
  pairs.emplace_back(mp, edit_po(*mp, {{"T2..0", "T2..1"}}, {"T1..0"}));
  for (const auto& [p, p2] : pairs) {
    for (ModelId m : kAllModels) {
      EXPECT_EQ(is_safe_effect(p, p2, m).safe, naive_safe(p, p2, m))
          << model_name(m) << "\n" << store_pretrace(*p2).dump();
    }
  }
}

TEST(Race, TriangularRaceExecution) {
  const auto pt = corpus_pretrace("triangular.litmus");
  const Execution e = make_execution(
      pt, {{"init_x", "T2..1"}, {"T1..0", "T3..0"}, {"init_y", "T3..1"}},
      {"T1..0", "T2..0"});
  ASSERT_TRUE(is_consistent(e, ModelId::TSO));
  const auto races = detect_triangular_race(e);
  const TriangularRace expected{"T1..0", "T2..1", "T2..0"};
  ASSERT_EQ(races, std::vector<TriangularRace>{expected});
  EXPECT_TRUE(check_atr_shape(e, expected));
  // mo with y=1 first fails condition (e).
  const Execution flipped = make_execution(
      pt, {{"init_x", "T2..1"}, {"T1..0", "T3..0"}, {"init_y", "T3..1"}},
      {"T2..0", "T1..0"});
  EXPECT_TRUE(detect_triangular_race(flipped).empty());
}

TEST(Race, NoneInOneThread) {
  const auto pt = corpus_pretrace("single_thread.litmus");
  for_each_candidate(pt, [&](const Execution& e) {
    EXPECT_TRUE(detect_triangular_race(e).empty());
  });
}

TEST(Race, ShapeHoldsForStaleReads) {
  // x=2 or an update po-between y=1 and a=x.
  for (const char* text : {"1: x=1;\n2: y=1; x=2; a=x;\n3: b=y;",
                           "1: x=1;\n2: y=1; rmw(z,r,1); a=x;"}) {
    const auto pt = pretrace_of(text);
    for_each_consistent(pt, ModelId::TSO, [&](const Execution& e) {
      for (const TriangularRace& r : detect_triangular_race(e)) {
        const unsigned wx = pt->index_of(r.w_x);
        const unsigned rx = pt->index_of(r.r_x);
        const auto src = static_cast<unsigned>(e.source(rx));
        if (e.mo.contains(src, wx)) EXPECT_TRUE(check_atr_shape(e, r)) << text;
      }
    });
  }
}

TEST(Race, ShapeFailsWhenRacingReadIsForwarded) {
  // a=x reads x=2 from its own buffer while x=1 precedes y=1 in mo: every
  // condition of the race holds and x=2 sits between y=1 and a=x.
  const auto pt = pretrace_of("1: x=1;\n2: y=1; x=2; a=x;");
  const Execution e = make_execution(pt, {{"T2..1", "T2..2"}},
                                     {"T1..0", "T2..0", "T2..1"});
  ASSERT_TRUE(is_consistent(e, ModelId::TSO));
  const TriangularRace r{"T1..0", "T2..2", "T2..0"};
  ASSERT_EQ(detect_triangular_race(e), std::vector<TriangularRace>{r});
  EXPECT_FALSE(check_atr_shape(e, r));
}

TEST(Race, ShapePreconditions) {
  const auto pt = corpus_pretrace("triangular.litmus");
  const Execution sc_only = make_execution(
      pt, {{"T1..0", "T2..1"}, {"T1..0", "T3..0"}, {"T2..0", "T3..1"}},
      {"T1..0", "T2..0"});
  EXPECT_THROW(check_atr_shape(sc_only, {"T1..0", "T2..1", "T2..0"}),
               PreconditionError);
}

TEST(Race, InliningIntroducesRace) {
  const auto p = corpus_pretrace("spin_inline.litmus");
  const auto p2 = corpus_pretrace("spin_inline.inlined.pretrace.json");
  const auto found = introduces_tr(p, p2);
  ASSERT_TRUE(found.has_value());
  EXPECT_EQ(found->race, (TriangularRace{"T2..0", "T4..1", "T3..0"}));
  EXPECT_FALSE(introduces_tr(p, p).has_value());
}

TEST(Document, EffectReport) {
  const auto p = corpus_pretrace("spin_exit.inlined.pretrace.json");
  const auto p2 = corpus_pretrace("spin_exit.forwarded.pretrace.json");
  const auto doc = store_effect(diff_effect(*p, *p2));
  EXPECT_EQ(doc["st_minus"], nlohmann::json::parse(R"(["T4..0"])"));
  const auto cls = store_effect_class(classify_effect(*p, *p2));
  EXPECT_EQ(cls["tuwri"], false);
}

}  // namespace
}  // namespace portcheck
