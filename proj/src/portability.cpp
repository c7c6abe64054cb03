// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "portcheck/portability.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <functional>
#include <numeric>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "portcheck/errors.hpp"
#include "portcheck/models.hpp"

namespace portcheck {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string tuwri_text(const TuwriWitness& w) {
  std::string s = "tuwri (" + w.w_y + ", ";
  if (!w.r_y.empty()) s += w.r_y + ", ";
  return s + w.r_x + ", " + w.w_x + ")";
}

std::vector<std::string> guard_reasons(const EffectClass& c, ModelId target) {
  std::vector<std::string> out;
  for (const auto& l : c.introduced_writes) out.push_back("wi " + l);
  for (const auto& l : c.eliminated_writes) out.push_back("we " + l);
  if (target == ModelId::TSO) {
    for (const auto& w : c.tuwri_witnesses) out.push_back(tuwri_text(w));
  }
  return out;
}

}  // namespace

PortVerdict port_check(const std::shared_ptr<const PreTrace>& p,
                       const std::shared_ptr<const PreTrace>& p2, ModelId target,
                       EnumOptions opts) {
  if (target == ModelId::SC) {
    throw PreconditionError("port target must be tso or sra");
  }
  PortVerdict v;
  v.target = target;
  const EffectClass c = classify_effect(*p, *p2);
  v.guard_reasons = guard_reasons(c, target);
  v.guard_passes = v.guard_reasons.empty();
  v.sc_safe = is_safe_effect(p, p2, ModelId::SC, opts).safe;
  SafetyResult t = is_safe_effect(p, p2, target, opts);
  v.target_safe = t.safe;
  if (v.sc_safe && !t.safe) v.counterexample = std::move(t.counterexample);
  return v;
}

ordered_json store_verdict(const PortVerdict& v) {
  ordered_json doc;
  doc["target"] = std::string(model_name(v.target));
  doc["guard"] = v.guard_passes ? "passes" : "fails";
  doc["guard_reasons"] = v.guard_reasons;
  doc["sc_safe"] = v.sc_safe;
  doc["target_safe"] = v.target_safe;
  doc["portable"] = v.portable();
  doc["theorem_violation"] = v.theorem_violation();
  if (v.counterexample) doc["counterexample"] = store_execution(*v.counterexample);
  return doc;
}

std::string_view template_name(Template t) {
  switch (t) {
    case Template::Swap:
      return "swap";
    case Template::Eliminate:
      return "eliminate";
    case Template::Introduce:
      return "introduce";
    case Template::Inline:
      return "inline";
  }
  return "?";
}

Template parse_template(std::string_view name) {
  for (Template t : {Template::Swap, Template::Eliminate, Template::Introduce,
                     Template::Inline}) {
    if (template_name(t) == name) return t;
  }
  throw ValidationError("unknown template '" + std::string(name) +
                        "' (expected swap, eliminate, introduce or inline)");
}

SearchBounds load_bounds(const json& doc) {
  if (!doc.is_object()) throw ValidationError("bounds must be a JSON object");
  SearchBounds b;
  auto get_unsigned = [&](const char* key, unsigned& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_unsigned()) {
      throw ValidationError(std::string("bounds.") + key + " must be a non-negative integer");
    }
    out = doc[key].get<unsigned>();
  };
  get_unsigned("max_threads", b.max_threads);
  get_unsigned("max_events", b.max_events);
  get_unsigned("locations", b.locations);
  get_unsigned("jobs", b.jobs);
  if (doc.contains("values")) b.values = doc["values"].get<std::vector<std::int64_t>>();
  if (doc.contains("templates")) {
    b.templates.clear();
    for (const auto& t : doc["templates"]) b.templates.push_back(parse_template(t.get<std::string>()));
  }
  if (doc.contains("budget_seconds")) b.budget_seconds = doc["budget_seconds"].get<double>();
  if (b.max_threads == 0 || b.max_events == 0 || b.locations == 0 || b.values.empty()) {
    throw ValidationError("bounds must be positive and the value set non-empty");
  }
  if (b.locations > 4) throw ValidationError("at most 4 locations are supported");
  if (b.max_events > 10) throw ValidationError("at most 10 events per program are supported");
  return b;
}

ordered_json store_bounds(const SearchBounds& b) {
  ordered_json doc;
  doc["max_threads"] = b.max_threads;
  doc["max_events"] = b.max_events;
  doc["locations"] = b.locations;
  doc["values"] = b.values;
  ordered_json t = ordered_json::array();
  for (Template x : b.templates) t.push_back(std::string(template_name(x)));
  doc["templates"] = std::move(t);
  doc["budget_seconds"] = b.budget_seconds;
  return doc;
}

namespace {

// Kind and location packed into one symbol: kind * locations + loc.
using Thread = std::vector<std::uint8_t>;
using Program = std::vector<Thread>;

bool thread_less(const Thread& a, const Thread& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

bool program_less(const Program& a, const Program& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      thread_less);
}

std::string loc_name(unsigned l) { return std::string(1, "xyzw"[l]); }

std::shared_ptr<const PreTrace> build_program(const Program& prog, unsigned locations,
                                              std::int64_t value) {
  std::vector<Event> events;
  std::vector<std::pair<unsigned, unsigned>> po;
  for (std::size_t t = 0; t < prog.size(); ++t) {
    const auto tid = static_cast<unsigned>(t + 1);
    for (std::size_t i = 0; i < prog[t].size(); ++i) {
      const unsigned sym = prog[t][i];
      Event e;
      e.label = "T" + std::to_string(tid) + ".." + std::to_string(i);
      e.tid = tid;
      e.kind = static_cast<Kind>(sym / locations);
      e.loc = loc_name(sym % locations);
      if (e.is_write()) e.wval = value;
      if (e.is_read()) e.local = "r" + std::to_string(tid) + std::to_string(i);
      if (i > 0) po.emplace_back(events.size() - 1, events.size());
      events.push_back(std::move(e));
    }
  }
  return std::make_shared<const PreTrace>(make_pretrace(std::move(events), po));
}

std::vector<Program> canonical_programs(const SearchBounds& b) {
  const unsigned symbols = 3 * b.locations;
  std::vector<std::vector<unsigned>> perms;
  std::vector<unsigned> perm(b.locations);
  std::iota(perm.begin(), perm.end(), 0u);
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  auto rename = [&](const Program& p, const std::vector<unsigned>& pi) {
    Program q = p;
    for (Thread& t : q) {
      for (auto& s : t) {
        s = static_cast<std::uint8_t>((s / b.locations) * b.locations + pi[s % b.locations]);
      }
    }
    std::sort(q.begin(), q.end(), thread_less);
    return q;
  };

  std::vector<Program> out;
  Program cur;
  // Threads are chosen in non-decreasing order; `first` is the smallest
  // thread the next one may be.
  std::function<void(Thread, unsigned)> extend = [&](Thread first, unsigned left) {
    if (!cur.empty()) {
      bool canonical = true;
      for (std::size_t k = 1; k < perms.size() && canonical; ++k) {
        if (program_less(rename(cur, perms[k]), cur)) canonical = false;
      }
      if (canonical) out.push_back(cur);
    }
    if (cur.size() == b.max_threads) return;
    for (unsigned len = std::max<unsigned>(1, static_cast<unsigned>(first.size()));
         len <= left; ++len) {
      Thread t(len, 0);
      if (len == first.size()) t = first;
      for (;;) {
        cur.push_back(t);
        extend(t, left - len);
        cur.pop_back();
        // Next sequence of this length.
        std::size_t k = len;
        while (k > 0 && t[k - 1] == symbols - 1) t[--k] = 0;
        if (k == 0) break;
        ++t[k - 1];
      }
    }
  };
  extend(Thread{}, b.max_events);
  std::stable_sort(out.begin(), out.end(), [](const Program& a, const Program& c) {
    std::size_t na = 0, nc = 0;
    for (const auto& t : a) na += t.size();
    for (const auto& t : c) nc += t.size();
    return na < nc;
  });
  return out;
}

// Program events of `p` in index order and the per-tid sequences.
struct Layout {
  std::vector<Event> events;
  std::vector<std::vector<unsigned>> threads;  // indices into events
  std::vector<std::pair<unsigned, unsigned>> cross;
};

Layout layout_of(const PreTrace& p) {
  Layout l;
  std::vector<int> to_local(p.size(), -1);
  for (unsigned i = 0; i < p.size(); ++i) {
    if (p.events[i].is_init()) continue;
    to_local[i] = static_cast<int>(l.events.size());
    l.events.push_back(p.events[i]);
  }
  for (unsigned tid : p.tids()) {
    std::vector<unsigned> seq;
    for (unsigned e : p.thread_events(tid)) seq.push_back(static_cast<unsigned>(to_local[e]));
    l.threads.push_back(std::move(seq));
  }
  for (auto [a, b] : p.po.pairs()) {
    if (p.events[a].tid != p.events[b].tid) {
      l.cross.emplace_back(static_cast<unsigned>(to_local[a]), static_cast<unsigned>(to_local[b]));
    }
  }
  return l;
}

std::shared_ptr<const PreTrace> rebuild(const Layout& l) {
  std::vector<std::pair<unsigned, unsigned>> po = l.cross;
  for (const auto& seq : l.threads) {
    for (std::size_t i = 1; i < seq.size(); ++i) po.emplace_back(seq[i - 1], seq[i]);
  }
  return std::make_shared<const PreTrace>(make_pretrace(l.events, po));
}

// Drops event `k` from a layout, renumbering the rest.
Layout without(const Layout& l, unsigned k) {
  Layout out;
  auto shift = [&](unsigned i) { return i > k ? i - 1 : i; };
  for (unsigned i = 0; i < l.events.size(); ++i) {
    if (i != k) out.events.push_back(l.events[i]);
  }
  for (const auto& seq : l.threads) {
    std::vector<unsigned> s;
    for (unsigned i : seq) {
      if (i != k) s.push_back(shift(i));
    }
    if (!s.empty()) out.threads.push_back(std::move(s));
  }
  for (auto [a, b] : l.cross) {
    if (a != k && b != k) out.cross.emplace_back(shift(a), shift(b));
  }
  return out;
}

}  // namespace

std::vector<std::shared_ptr<const PreTrace>> bounded_programs(const SearchBounds& b) {
  std::vector<std::shared_ptr<const PreTrace>> out;
  const std::int64_t value = *std::max_element(b.values.begin(), b.values.end());
  for (const Program& p : canonical_programs(b)) out.push_back(build_program(p, b.locations, value));
  return out;
}

std::vector<Variant> apply_templates(const PreTrace& p,
                                     const std::vector<Template>& templates) {
  std::vector<Variant> out;
  const Layout base = layout_of(p);
  auto label = [&](unsigned i) { return base.events[i].label; };
  for (Template t : templates) {
    switch (t) {
      case Template::Swap:
        for (std::size_t th = 0; th < base.threads.size(); ++th) {
          for (std::size_t i = 0; i + 1 < base.threads[th].size(); ++i) {
            Layout l = base;
            std::swap(l.threads[th][i], l.threads[th][i + 1]);
            out.push_back({"swap " + label(base.threads[th][i]) + " " +
                               label(base.threads[th][i + 1]),
                           t, rebuild(l)});
          }
        }
        break;
      case Template::Eliminate:
        for (unsigned k = 0; k < base.events.size(); ++k) {
          if (base.events.size() == 1) break;
          out.push_back({"eliminate " + label(k), t, rebuild(without(base, k))});
        }
        break;
      case Template::Introduce:
        for (std::size_t th = 0; th < base.threads.size(); ++th) {
          for (std::size_t i = 0; i < base.threads[th].size(); ++i) {
            Layout l = base;
            const unsigned src = base.threads[th][i];
            Event dup = base.events[src];
            dup.label += "d";
            if (dup.is_read()) dup.local += "d";
            l.events.push_back(dup);
            l.threads[th].insert(l.threads[th].begin() + static_cast<long>(i) + 1,
                                 static_cast<unsigned>(l.events.size() - 1));
            out.push_back({"introduce " + dup.label, t, rebuild(l)});
          }
        }
        break;
      case Template::Inline:
        for (std::size_t a = 0; a < base.threads.size(); ++a) {
          for (std::size_t bt = 0; bt < base.threads.size(); ++bt) {
            if (a == bt) continue;
            Layout l = base;
            const unsigned e = base.threads[a].front();
            const unsigned into = base.events[base.threads[bt].front()].tid;
            l.events[e].tid = into;
            l.threads[a].erase(l.threads[a].begin());
            for (unsigned rest : l.threads[a]) l.cross.emplace_back(e, rest);
            l.threads[bt].insert(l.threads[bt].begin(), e);
            if (l.threads[a].empty()) l.threads.erase(l.threads.begin() + static_cast<long>(a));
            out.push_back({"inline " + label(e) + " into T" + std::to_string(into), t,
                           rebuild(l)});
          }
        }
        break;
    }
  }
  return out;
}

namespace {

enum Claim : unsigned {
  kGuardTso,
  kGuardSra,
  kTuwriRace,
  kTuwriIntroduces,
  kPlainTuwriRace,
  kPlainTuwriIntroduces,
  kWwDeorder,
  kSameLocDeorder,
  kCrucialSet,
  kFlip,
  kFlipAnyPrefix,
  kTsoOnlyCycle,
  kCatalogue,
  kRaceShape,
  kWeakness,
  kGuardOrder,
  kClaimCount
};

constexpr const char* kClaimNames[kClaimCount] = {
    "guard_implies_tso_portable",
    "no_write_change_implies_sra_portable",
    "tuwri_has_tso_race",
    "tuwri_introduces_race",
    "plain_tuwri_has_tso_race",
    "plain_tuwri_introduces_race",
    "ww_deorder_sc_unsafe",
    "same_loc_deorder_sc_unsafe",
    "crucial_set_exists",
    "moext_flip_exists",
    "moext_flip_exists_any_prefix",
    "tso_only_has_rb_moext_po",
    "catalogue_complete",
    "stale_race_shape",
    "weakness_chain",
    "sra_guard_weaker",
};

constexpr std::size_t kMaxViolationsPerClaim = 5;

// Programs that recorded a violation, per claim. Lets later programs skip
// building documents that the merge would drop.
class Quota {
 public:
  bool full_before(unsigned c, std::size_t program) {
    std::lock_guard<std::mutex> lock(m_);
    const auto& v = by_claim_[c];
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](std::size_t i) {
             return i < program;
           })) >= kMaxViolationsPerClaim;
  }
  void note(unsigned c, std::size_t program) {
    std::lock_guard<std::mutex> lock(m_);
    by_claim_[c].push_back(program);
  }

 private:
  std::mutex m_;
  std::array<std::vector<std::size_t>, kClaimCount> by_claim_;
};

struct Tally {
  Quota* quota = nullptr;
  std::size_t program = 0;
  std::uint64_t pairs = 0;
  std::uint64_t executions = 0;
  std::array<std::uint64_t, 4> template_pairs{};
  std::array<ClaimTally, kClaimCount> claims{};
  std::vector<std::pair<unsigned, ordered_json>> violations;

  void check(Claim c, bool ok, const std::function<ordered_json()>& detail) {
    ++claims[c].checked;
    if (ok) return;
    ++claims[c].violated;
    std::size_t have = 0;
    for (const auto& v : violations) have += v.first == c;
    if (have >= kMaxViolationsPerClaim) return;
    if (quota && have == 0) {
      if (quota->full_before(c, program)) return;
      quota->note(c, program);
    }
    {
      ordered_json doc = detail();
      doc["claim"] = kClaimNames[c];
      violations.emplace_back(c, std::move(doc));
    }
  }
};

// Location of a violation, built only when one is recorded.
using Where = std::function<ordered_json()>;

struct Classified {
  Execution e;
  bool sc, tso;
};

// SRA-consistent executions (a superset of the TSO and SC ones) with their
// TSO and SC verdicts.
std::vector<Classified> classify_consistent(const std::shared_ptr<const PreTrace>& pt) {
  std::vector<Classified> out;
  for_each_classified(pt, [&](const Execution& e, bool sc, bool tso) {
    out.push_back({e, sc, tso});
  });
  return out;
}

bool stale_source(const Execution& e, const TriangularRace& r) {
  const PreTrace& pt = *e.pt;
  const int src = e.source(pt.index_of(r.r_x));
  return src >= 0 && e.mo.contains(static_cast<unsigned>(src), pt.index_of(r.w_x));
}

void check_tso_execution(const Execution& e, const Derived& d, bool sc, Tally& t,
                         const Where& where) {
  if (!sc) {
    t.check(kTsoOnlyCycle, has_rb_moext_po_cycle(d), [&] {
      ordered_json v = where();
      v["execution"] = store_execution(e);
      return v;
    });
  }
  for (const TriangularRace& r : detect_triangular_race(e)) {
    if (!stale_source(e, r)) continue;
    t.check(kRaceShape, check_atr_shape(e, r), [&] {
      ordered_json v = where();
      v["execution"] = store_execution(e);
      v["race"] = store_race(r);
      return v;
    });
  }
}

// Claims over the executions of one source program.
void check_program(const std::shared_ptr<const PreTrace>& p, Tally& t,
                   const Where& where) {
  const PreTrace& pt = *p;
  for_each_coherent_verdicts(p, [&](const Execution& e, bool sc, bool tso, bool sra) {
    ++t.executions;
    const Derived d = derive(e);
    t.check(kWeakness, (!sc || tso) && (!tso || sra), [&] {
      ordered_json v = where();
      v["execution"] = store_execution(e);
      return v;
    });
    for (ModelId m : kAllModels) {
      const bool ok = m == ModelId::SC ? sc : m == ModelId::TSO ? tso : sra;
      if (ok) continue;
      t.check(kCatalogue, catalogue_tagged(d, m), [&] {
        ordered_json v = where();
        v["model"] = std::string(model_name(m));
        v["execution"] = store_execution(e);
        return v;
      });
    }
    if (tso) check_tso_execution(e, d, sc, t, where);
    for (EventMask s = pt.reads; s != 0; s &= s - 1) {
      const unsigned rx = std::countr_zero(s);
      if (!flip_hypotheses_hold(d, rx) || !rwr_cycle(d, rx)) continue;
      auto detail = [&] {
        ordered_json v = where();
        v["execution"] = store_execution(e);
        v["read"] = pt.events[rx].label;
        return v;
      };
      const bool kept = moext_flip_exists(e, rx);
      t.check(kFlip, kept, detail);
      t.check(kFlipAnyPrefix, kept || moext_flip_exists(e, rx, false), detail);
    }
  });
  // A crucial set exists exactly when dropping all of rf leaves an
  // SC-consistent execution, which depends on mo alone.
  std::vector<unsigned> inits, perm;
  for (unsigned i = 0; i < pt.size(); ++i) {
    if (pt.inits & bit(i)) inits.push_back(i);
    else if (pt.writes & bit(i)) perm.push_back(i);
  }
  const Rel po_w = restrict(pt.po, pt.writes);
  const Rel no_rf(pt.size());
  std::vector<unsigned> order = inits;
  order.resize(inits.size() + perm.size());
  do {
    std::copy(perm.begin(), perm.end(), order.begin() + static_cast<long>(inits.size()));
    const Rel mo = order_relation(pt.size(), order);
    if (!is_irreflexive(compose(mo, po_w))) continue;
    t.check(kCrucialSet, is_consistent(derive(pt, no_rf, mo), ModelId::SC), [&] {
      ordered_json v = where();
      v["execution"] = store_execution(Execution{p, no_rf, mo});
      return v;
    });
  } while (std::next_permutation(perm.begin(), perm.end()));
}

void check_pair(const std::shared_ptr<const PreTrace>& p,
                const std::vector<Classified>& source, const Variant& var, Tally& t,
                const Where& where_program) {
  ++t.pairs;
  ++t.template_pairs[static_cast<unsigned>(var.kind)];
  const Effect eff = diff_effect(*p, *var.target);
  const EffectClass cls = classify_effect(*p, *var.target, eff);
  const BehaviorKey src_key(eff, false);
  const BehaviorKey dst_key(eff, true);

  std::array<std::unordered_set<std::string>, 3> keys;  // SC, TSO, SRA
  std::unordered_map<std::string, std::set<TriangularRace>> source_races;
  for (const Classified& c : source) {
    std::string k = src_key(c.e);
    if (c.sc) keys[0].insert(k);
    if (c.tso) {
      keys[1].insert(k);
      if (cls.tuwri) {
        for (auto& r : detect_triangular_race(c.e)) source_races[k].insert(std::move(r));
      }
    }
    keys[2].insert(std::move(k));
  }

  const Where where = [&] {
    ordered_json v = where_program();
    v["variant"] = var.name;
    v["target"] = store_pretrace(*var.target);
    return v;
  };

  std::array<bool, 3> safe = {true, true, true};
  std::array<std::optional<Execution>, 3> witness;
  bool tso_race = false;
  bool introduced = false;
  for (const Classified& c : classify_consistent(var.target)) {
    ++t.executions;
    const std::string k = dst_key(c.e);
    const std::array<bool, 3> in = {c.sc, c.tso, true};
    for (unsigned m = 0; m < 3; ++m) {
      if (in[m] && safe[m] && !keys[m].contains(k)) {
        safe[m] = false;
        witness[m] = c.e;
      }
    }
    if (c.tso) {
      const Derived d = derive(c.e);
      check_tso_execution(c.e, d, c.sc, t, where);
      if (cls.tuwri) {
        const auto races = detect_triangular_race(c.e);
        if (!races.empty()) tso_race = true;
        const auto it = source_races.find(k);
        for (const auto& r : races) {
          if (it == source_races.end() || !it->second.contains(r)) introduced = true;
        }
      }
    }
  }

  const bool no_write_change = !cls.wi && !cls.we;
  const bool guard_tso = no_write_change && !cls.tuwri;
  auto detail = [&](unsigned m) {
    return [&, m] {
      ordered_json v = where();
      v["class"] = store_effect_class(cls);
      if (witness[m]) v["execution"] = store_execution(*witness[m]);
      return v;
    };
  };
  if (guard_tso && safe[0]) t.check(kGuardTso, safe[1], detail(1));
  if (no_write_change && safe[0]) t.check(kGuardSra, safe[2], detail(2));
  if (cls.tuwri) {
    t.check(kTuwriRace, tso_race, detail(1));
    t.check(kTuwriIntroduces, introduced, detail(1));
    // Same claims restricted to witnesses whose w_y and r_x are not updates
    // and have no update or write to r_x's location po-between them in P'.
    const PreTrace& q = *var.target;
    const bool plain = std::any_of(
        cls.tuwri_witnesses.begin(), cls.tuwri_witnesses.end(), [&](const TuwriWitness& w) {
          const unsigned wy = q.index_of(w.w_y);
          const unsigned rx = q.index_of(w.r_x);
          const EventMask between = q.po.row(wy) & q.po.column(rx);
          const EventMask blocking = q.updates | (q.writes & q.loc_events[q.loc_index[rx]]);
          return !(q.updates & (bit(wy) | bit(rx))) && !(between & blocking);
        });
    if (plain) {
      t.check(kPlainTuwriRace, tso_race, detail(1));
      t.check(kPlainTuwriIntroduces, introduced, detail(1));
    }
  }
  if (cls.ww_deord) t.check(kWwDeorder, !safe[0], detail(0));
  if (cls.same_loc_wr_deord || cls.same_loc_rw_deord) {
    t.check(kSameLocDeorder, !safe[0], detail(0));
  }
  t.check(kGuardOrder, !guard_tso || no_write_change, detail(0));
}

}  // namespace

bool SearchReport::violated() const {
  for (const auto& [name, c] : claims) {
    if (c.violated != 0) return true;
  }
  return false;
}

SearchReport theorem_search(const SearchBounds& bounds) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto programs = bounded_programs(bounds);
  const std::size_t n = programs.size();
  std::vector<Tally> tallies(n);
  std::vector<char> done(n, 0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> out_of_time{false};
  Quota quota;

  auto worker = [&] {
    for (;;) {
      if (out_of_time.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      if (bounds.budget_seconds > 0) {
        const std::chrono::duration<double> spent = Clock::now() - start;
        if (spent.count() > bounds.budget_seconds) {
          out_of_time = true;
          return;
        }
      }
      const auto& p = programs[i];
      const Where where = [&] {
        ordered_json v;
        v["program_index"] = i;
        v["program"] = store_pretrace(*p);
        return v;
      };
      Tally& t = tallies[i];
      t.quota = &quota;
      t.program = i;
      check_program(p, t, where);
      const auto source = classify_consistent(p);
      for (const Variant& v : apply_templates(*p, bounds.templates)) {
        check_pair(p, source, v, t, where);
      }
      done[i] = 1;
    }
  };
  const unsigned jobs = std::max(1u, bounds.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SearchReport r;
  r.bounds = bounds;
  for (unsigned c = 0; c < kClaimCount; ++c) r.claims[kClaimNames[c]] = {};
  for (Template tp : bounds.templates) r.template_pairs[std::string(template_name(tp))] = 0;
  std::array<std::size_t, kClaimCount> kept{};
  for (std::size_t i = 0; i < n; ++i) {
    if (!done[i]) {
      r.complete = false;
      continue;
    }
    const Tally& t = tallies[i];
    ++r.programs;
    r.pairs += t.pairs;
    r.executions += t.executions;
    for (Template tp : bounds.templates) {
      r.template_pairs[std::string(template_name(tp))] += t.template_pairs[static_cast<unsigned>(tp)];
    }
    for (unsigned c = 0; c < kClaimCount; ++c) {
      r.claims[kClaimNames[c]].checked += t.claims[c].checked;
      r.claims[kClaimNames[c]].violated += t.claims[c].violated;
    }
    for (const auto& [c, doc] : t.violations) {
      if (kept[c] < kMaxViolationsPerClaim) {
        ++kept[c];
        r.violations.push_back(doc);
      }
    }
  }
  return r;
}

ordered_json store_search_report(const SearchReport& r) {
  ordered_json doc;
  doc["schema"] = 1;
  doc["bounds"] = store_bounds(r.bounds);
  doc["complete"] = r.complete;
  doc["programs"] = r.programs;
  doc["pairs"] = r.pairs;
  doc["executions"] = r.executions;
  ordered_json tp = ordered_json::object();
  for (const auto& [name, count] : r.template_pairs) tp[name] = count;
  doc["template_pairs"] = std::move(tp);
  ordered_json claims = ordered_json::object();
  for (const auto& [name, c] : r.claims) {
    claims[name] = {{"checked", c.checked}, {"violated", c.violated}};
  }
  doc["claims"] = std::move(claims);
  doc["violations"] = r.violations;
  return doc;
}

std::vector<AuditEntry> weakness_audit(const std::vector<SourceFile>& corpus,
                                       EnumOptions opts) {
  std::vector<AuditEntry> out;
  for (const SourceFile& f : corpus) {
    for (const auto& pt : f.pretraces) {
      AuditEntry a;
      a.source = f.name;
      a.path = pt->path;
      a.threads = static_cast<unsigned>(pt->tids().size());
      a.has_updates = pt->updates != 0;
      for_each_consistent(
          pt, ModelId::SRA,
          [&](const Execution& e) {
            const Derived d = derive(e);
            const bool sc = is_consistent(d, ModelId::SC);
            const bool tso = is_consistent(d, ModelId::TSO);
            ++a.sra;
            a.tso += tso;
            a.sc += sc;
            if (sc && !tso) a.sc_in_tso = false;
          },
          opts);
      // Executions outside SRA must be outside TSO as well.
      for_each_consistent(
          pt, ModelId::TSO,
          [&](const Execution& e) {
            if (!is_consistent(e, ModelId::SRA)) a.tso_in_sra = false;
          },
          opts);
      out.push_back(std::move(a));
    }
  }
  return out;
}

ordered_json store_audit(const std::vector<AuditEntry>& entries) {
  ordered_json doc;
  doc["schema"] = 1;
  ordered_json rows = ordered_json::array();
  bool ok = true;
  for (const AuditEntry& a : entries) {
    ordered_json r;
    r["source"] = a.source;
    if (!a.path.empty()) r["path"] = a.path;
    r["threads"] = a.threads;
    r["updates"] = a.has_updates;
    r["sc"] = a.sc;
    r["tso"] = a.tso;
    r["sra"] = a.sra;
    r["sc_in_tso"] = a.sc_in_tso;
    r["tso_in_sra"] = a.tso_in_sra;
    r["sc_strictly_in_tso"] = a.sc_in_tso && a.sc < a.tso;
    r["tso_strictly_in_sra"] = a.tso_in_sra && a.tso < a.sra;
    ok = ok && a.sc_in_tso && a.tso_in_sra;
    rows.push_back(std::move(r));
  }
  doc["entries"] = std::move(rows);
  doc["chain_holds"] = ok;
  return doc;
}

}  // namespace portcheck
