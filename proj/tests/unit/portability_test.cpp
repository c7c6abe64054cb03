// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "portcheck/portability.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <tuple>

#include "portcheck/errors.hpp"
#include "portcheck/models.hpp"
#include "test_util.hpp"

namespace portcheck {
namespace {

using testing::corpus_pretrace;
using testing::pretrace_of;

TEST(PortCheck, InliningIntoSpinLoopIsNotTsoPortable) {
  const auto p = corpus_pretrace("spin_inline.litmus");
  const auto p2 = corpus_pretrace("spin_inline.inlined.pretrace.json");
  const PortVerdict v = port_check(p, p2, ModelId::TSO);
  EXPECT_FALSE(v.guard_passes);
  EXPECT_EQ(v.guard_reasons, (std::vector<std::string>{"tuwri (T3..0, T4..1, T2..0)",
                                                       "tuwri (T3..0, T4..0, T4..1, T2..0)"}));
  EXPECT_TRUE(v.sc_safe);
  EXPECT_FALSE(v.target_safe);
  EXPECT_FALSE(v.portable());
  EXPECT_FALSE(v.theorem_violation());
  ASSERT_TRUE(v.counterexample.has_value());
  EXPECT_TRUE(is_consistent(*v.counterexample, ModelId::TSO));
  EXPECT_FALSE(is_consistent(*v.counterexample, ModelId::SC));
}

TEST(PortCheck, SraGuardIgnoresTuwri) {
  const auto p = corpus_pretrace("spin_inline.litmus");
  const auto p2 = corpus_pretrace("spin_inline.inlined.pretrace.json");
  const PortVerdict v = port_check(p, p2, ModelId::SRA);
  EXPECT_TRUE(v.guard_passes);
  EXPECT_TRUE(v.sc_safe);
  EXPECT_FALSE(v.theorem_violation());
}

TEST(PortCheck, ForwardingPairPassesGuard) {
  const auto p = corpus_pretrace("spin_exit.inlined.pretrace.json");
  const auto p2 = corpus_pretrace("spin_exit.forwarded.pretrace.json");
  for (ModelId m : {ModelId::TSO, ModelId::SRA}) {
    const PortVerdict v = port_check(p, p2, m);
    EXPECT_TRUE(v.guard_passes) << model_name(m);
    EXPECT_TRUE(v.portable()) << model_name(m);
  }
}

TEST(PortCheck, IdentityIsPortable) {
  const auto p = corpus_pretrace("sb.litmus");
  const PortVerdict v = port_check(p, p, ModelId::TSO);
  EXPECT_TRUE(v.guard_passes);
  EXPECT_TRUE(v.sc_safe);
  EXPECT_TRUE(v.target_safe);
  EXPECT_FALSE(v.counterexample.has_value());
  const auto doc = store_verdict(v);
  EXPECT_EQ(doc["guard"], "passes");
  EXPECT_EQ(doc["portable"], true);
}

TEST(PortCheck, ScTargetRejected) {
  const auto p = corpus_pretrace("sb.litmus");
  EXPECT_THROW(port_check(p, p, ModelId::SC), PreconditionError);
}

TEST(PortCheck, IntroducedWriteFailsGuard) {
  const auto p = pretrace_of("1: x=1;\n2: a=x;");
  auto events = p->events;
  std::vector<Event> prog;
  for (const Event& e : events) {
    if (!e.is_init()) prog.push_back(e);
  }
  Event w = prog[0];
  w.label = "T1..0d";
  prog.push_back(w);
  const auto p2 = std::make_shared<const PreTrace>(make_pretrace(prog, {{0, 2}}));
  const PortVerdict v = port_check(p, p2, ModelId::TSO);
  EXPECT_FALSE(v.guard_passes);
  EXPECT_EQ(v.guard_reasons, std::vector<std::string>{"wi T1..0d"});
}

TEST(Templates, NamesRoundTrip) {
  for (Template t : {Template::Swap, Template::Eliminate, Template::Introduce,
                     Template::Inline}) {
    EXPECT_EQ(parse_template(template_name(t)), t);
  }
  EXPECT_THROW(parse_template("fuse"), ValidationError);
}

TEST(Templates, Applications) {
  const auto p = pretrace_of("1: x=1; a=y;\n2: y=1;");
  const auto vars = apply_templates(*p, {Template::Swap, Template::Eliminate,
                                         Template::Introduce, Template::Inline});
  std::vector<std::string> names;
  for (const auto& v : vars) names.push_back(v.name);
  const std::vector<std::string> want = {
      "swap T1..0 T1..1",   "eliminate T1..0",    "eliminate T1..1",
      "eliminate T2..0",    "introduce T1..0d",   "introduce T1..1d",
      "introduce T2..0d",   "inline T1..0 into T2", "inline T2..0 into T1"};
  EXPECT_EQ(names, want);
  for (const auto& v : vars) {
    EXPECT_TRUE(validate_pretrace(*v.target).empty()) << v.name;
    EXPECT_TRUE(thread_total(*v.target)) << v.name;
  }
  // Swapping reverses the thread order and keeps labels.
  const PreTrace& sw = *vars[0].target;
  EXPECT_TRUE(sw.po.contains(sw.index_of("T1..1"), sw.index_of("T1..0")));
  // Inlining keeps po from the moved event to the rest of its thread.
  const PreTrace& in = *vars[7].target;
  const unsigned moved = in.index_of("T1..0");
  EXPECT_EQ(in.events[moved].tid, 2u);
  EXPECT_TRUE(in.po.contains(moved, in.index_of("T2..0")));
  EXPECT_TRUE(in.po.contains(moved, in.index_of("T1..1")));
  const auto cls = classify_effect(*p, in);
  EXPECT_FALSE(cls.wi || cls.we);
}

Variant variant_named(const PreTrace& p, const std::string& name) {
  for (auto& v : apply_templates(p, {Template::Swap, Template::Eliminate,
                                     Template::Introduce, Template::Inline})) {
    if (v.name == name) return v;
  }
  ADD_FAILURE() << "no variant " << name;
  return {};
}

TEST(Findings, TuwriWithUpdateAsWyHasNoTsoRace) {
  // The inlined update drains the store buffer, so no TSO execution of P'
  // has a triangular race although the effect is tuwri.
  const auto p = pretrace_of("1: a=x;\n2: x=1;\n3: rmw(y,b,1);");
  const Variant v = variant_named(*p, "inline T3..0 into T1");
  const auto cls = classify_effect(*p, *v.target);
  ASSERT_TRUE(cls.tuwri);
  EXPECT_EQ(cls.tuwri_witnesses[0].w_y, "T3..0");
  for_each_consistent(v.target, ModelId::TSO, [](const Execution& e) {
    EXPECT_TRUE(detect_triangular_race(e).empty());
  });
  EXPECT_FALSE(introduces_tr(p, v.target).has_value());
}

TEST(Findings, TuwriWithUpdateBetweenHasNoTsoRace) {
  const auto p = pretrace_of("1: x=1;\n2: y=1;\n3: rmw(x,a,1); b=y;");
  const Variant v = variant_named(*p, "inline T1..0 into T3");
  const auto cls = classify_effect(*p, *v.target);
  ASSERT_TRUE(cls.tuwri);
  for_each_consistent(v.target, ModelId::TSO, [](const Execution& e) {
    EXPECT_TRUE(detect_triangular_race(e).empty());
  });
}

TEST(Findings, FlipMayNeedToMoveSourcePrefix) {
  // a reads x=1 and x=2 is mo-after it yet po-before a; the only repair
  // moves x=2 ahead of a's source.
  const auto pt = pretrace_of("1: x=1;\n2: x=2; a=x;");
  const Execution e =
      testing::make_execution(pt, {{"T1..0", "T2..1"}}, {"T1..0", "T2..0"});
  const unsigned rx = pt->index_of("T2..1");
  ASSERT_TRUE(flip_hypotheses_hold(e, rx));
  ASSERT_TRUE(rwr_cycle(derive(e), rx));
  EXPECT_FALSE(flip_moext_witness(e, rx).has_value());
  const auto w = flip_moext_witness(e, rx, false);
  ASSERT_TRUE(w.has_value());
  EXPECT_FALSE(rwr_cycle(derive(*w), rx));
  EXPECT_TRUE(is_consistent(*w, ModelId::SC));
}

TEST(Templates, SwapGivesWwDeordering) {
  const auto p = pretrace_of("1: x=1; y=1;\n2: a=y; b=x;");
  const auto vars = apply_templates(*p, {Template::Swap});
  ASSERT_EQ(vars.size(), 2u);
  const auto cls = classify_effect(*p, *vars[0].target);
  EXPECT_TRUE(cls.ww_deord);
  EXPECT_FALSE(is_safe_effect(p, vars[0].target, ModelId::SC).safe);
}

// Independent count of canonical programs: every multiset of non-empty
// threads, reduced by location renaming through a set of normal forms.
std::size_t brute_program_count(unsigned threads, unsigned events, unsigned locs) {
  using Th = std::vector<unsigned>;
  std::vector<Th> all;
  for (unsigned len = 1; len <= events; ++len) {
    Th t(len, 0);
    for (;;) {
      all.push_back(t);
      std::size_t k = len;
      while (k > 0 && t[k - 1] == 3 * locs - 1) t[--k] = 0;
      if (k == 0) break;
      ++t[k - 1];
    }
  }
  std::set<std::vector<Th>> forms;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t from, unsigned left) {
    if (!pick.empty()) {
      std::vector<unsigned> perm(locs);
      std::iota(perm.begin(), perm.end(), 0u);
      std::vector<Th> best;
      do {
        std::vector<Th> prog;
        for (std::size_t i : pick) {
          Th t = all[i];
          for (auto& s : t) s = (s / locs) * locs + perm[s % locs];
          prog.push_back(t);
        }
        std::sort(prog.begin(), prog.end());
        if (best.empty() || prog < best) best = prog;
      } while (std::next_permutation(perm.begin(), perm.end()));
      forms.insert(best);
    }
    if (pick.size() == threads) return;
    for (std::size_t i = from; i < all.size(); ++i) {
      if (all[i].size() > left) continue;
      pick.push_back(i);
      rec(i, left - static_cast<unsigned>(all[i].size()));
      pick.pop_back();
    }
  };
  rec(0, events);
  return forms.size();
}

TEST(Search, ProgramCountMatchesBruteForce) {
  for (auto [t, e, l] : {std::tuple{2u, 3u, 2u}, {3u, 4u, 2u}, {2u, 4u, 1u}}) {
    SearchBounds b;
    b.max_threads = t;
    b.max_events = e;
    b.locations = l;
    EXPECT_EQ(bounded_programs(b).size(), brute_program_count(t, e, l))
        << t << " " << e << " " << l;
  }
}

TEST(Search, ProgramsAreValidAndDistinct) {
  SearchBounds b;
  b.max_events = 4;
  std::set<std::string> seen;
  for (const auto& p : bounded_programs(b)) {
    EXPECT_TRUE(validate_pretrace(*p).empty());
    EXPECT_TRUE(seen.insert(store_pretrace(*p).dump()).second);
  }
}

TEST(Search, SmallBoundsHaveNoViolations) {
  SearchBounds b;
  b.max_threads = 3;
  b.max_events = 4;
  const SearchReport r = theorem_search(b);
  EXPECT_TRUE(r.complete);
  // The literal tuwri race claims and the prefix-preserving flip have
  // counterexamples (see Findings); their refined forms must hold.
  const std::set<std::string> literal = {"tuwri_has_tso_race", "tuwri_introduces_race",
                                         "moext_flip_exists"};
  for (const auto& [name, c] : r.claims) {
    if (literal.contains(name)) {
      EXPECT_GT(c.violated, 0u) << name;
    } else {
      EXPECT_EQ(c.violated, 0u) << name;
    }
  }
  EXPECT_GT(r.claims.at("plain_tuwri_has_tso_race").checked, 0u);
  EXPECT_GT(r.claims.at("moext_flip_exists_any_prefix").checked, 0u);
  EXPECT_GT(r.pairs, 0u);
  EXPECT_GT(r.claims.at("guard_implies_tso_portable").checked, 0u);
  EXPECT_GT(r.claims.at("tuwri_has_tso_race").checked, 0u);
  EXPECT_GT(r.claims.at("ww_deorder_sc_unsafe").checked, 0u);
  EXPECT_GT(r.claims.at("stale_race_shape").checked, 0u);
  for (const auto& [name, count] : r.template_pairs) EXPECT_GT(count, 0u) << name;
}

TEST(Search, DeterministicAcrossJobCounts) {
  SearchBounds b;
  b.max_events = 4;
  b.templates = {Template::Swap, Template::Inline};
  const auto one = store_search_report(theorem_search(b)).dump();
  b.jobs = 3;
  const auto three = store_search_report(theorem_search(b)).dump();
  EXPECT_EQ(one, three);
}

TEST(Search, BoundsRoundTrip) {
  SearchBounds b;
  b.max_events = 5;
  b.templates = {Template::Inline};
  b.budget_seconds = 30;
  const SearchBounds c = load_bounds(nlohmann::json::parse(store_bounds(b).dump()));
  EXPECT_EQ(store_bounds(c), store_bounds(b));
  EXPECT_THROW(load_bounds(nlohmann::json::parse(R"({"max_events": 0})")), ValidationError);
  EXPECT_THROW(load_bounds(nlohmann::json::parse(R"({"templates": ["x"]})")), ValidationError);
}

TEST(Audit, ChainHoldsOnCorpus) {
  const auto corpus = load_corpus(PORTCHECK_CORPUS_DIR);
  const auto entries = weakness_audit(corpus);
  ASSERT_FALSE(entries.empty());
  bool strict_tso = false, strict_sra = false;
  for (const AuditEntry& a : entries) {
    EXPECT_TRUE(a.sc_in_tso) << a.source;
    EXPECT_TRUE(a.tso_in_sra) << a.source;
    EXPECT_LE(a.sc, a.tso);
    EXPECT_LE(a.tso, a.sra);
    strict_tso |= a.sc < a.tso;
    strict_sra |= a.tso < a.sra;
  }
  EXPECT_TRUE(strict_tso);
  EXPECT_TRUE(strict_sra);
  EXPECT_EQ(store_audit(entries)["chain_holds"], true);
}

}  // namespace
}  // namespace portcheck
