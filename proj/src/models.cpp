// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "portcheck/models.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <functional>
#include <map>
#include <span>
#include <unordered_set>

#include "portcheck/errors.hpp"

namespace portcheck {

std::string_view model_name(ModelId m) {
  switch (m) {
    case ModelId::SC:
      return "SC";
    case ModelId::TSO:
      return "TSO";
    case ModelId::SRA:
      return "SRA";
  }
  return "?";
}

ModelId parse_model(std::string_view name) {
  std::string up;
  for (char c : name) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "SC") return ModelId::SC;
  if (up == "TSO") return ModelId::TSO;
  if (up == "SRA") return ModelId::SRA;
  throw ValidationError("unknown model '" + std::string(name) +
                        "' (expected sc, tso or sra)");
}

Derived derive(const PreTrace& pt, const Rel& rf, const Rel& mo) {
  if (!(rf - pt.same_loc).empty()) {
    throw ValidationError("rf pairs events of different locations");
  }
  Derived d;
  d.po = pt.po;
  d.rf = rf;
  d.mo = mo;
  d.writes = pt.writes;
  d.inits = pt.inits;
  d.rfi = rf & pt.same_thread;
  d.rfe = rf - d.rfi;
  d.hb = tclosure(pt.po | rf);
  d.mo_loc = mo & pt.same_loc;
  d.mo_nonloc = mo - d.mo_loc;
  d.rb = compose(inverse(rf), d.mo_loc) - Rel::identity_on(pt.size(), pt.all());
  d.mo_ext = mo - d.hb;
  d.upd = Rel::identity_on(pt.size(), pt.updates);
  return d;
}

Derived derive(const Execution& e) { return derive(*e.pt, e.rf, e.mo); }

namespace {

using Chain = std::vector<const Rel*>;

struct Rule {
  char tag;
  std::function<Chain(const Derived&)> chain;  // empty chain: mo totality
};

Chain chain_of(std::initializer_list<const Rel*> rels) { return rels; }

const std::vector<Rule>& sc_rules() {
  static const std::vector<Rule> rules{
      {'a', [](const Derived&) { return Chain{}; }},
      {'b', [](const Derived& d) { return chain_of({&d.hb}); }},
      {'c', [](const Derived& d) { return chain_of({&d.mo, &d.hb}); }},
      {'d', [](const Derived& d) { return chain_of({&d.rb, &d.hb}); }},
      {'e', [](const Derived& d) { return chain_of({&d.rb, &d.mo}); }},
      {'f', [](const Derived& d) { return chain_of({&d.rb, &d.mo, &d.hb}); }},
  };
  return rules;
}

const std::vector<Rule>& tso_rules() {
  static const std::vector<Rule> rules = [] {
    std::vector<Rule> r(sc_rules().begin(), sc_rules().end() - 1);
    r.push_back({'f', [](const Derived& d) {
                   return chain_of({&d.rb, &d.mo, &d.rfe, &d.po});
                 }});
    r.push_back({'g', [](const Derived& d) {
                   return chain_of({&d.rb, &d.mo, &d.upd, &d.po});
                 }});
    return r;
  }();
  return rules;
}

const std::vector<Rule>& sra_rules() {
  static const std::vector<Rule> rules(sc_rules().begin(),
                                       sc_rules().end() - 1);
  return rules;
}

const std::vector<Rule>& rules_of(ModelId m) {
  switch (m) {
    case ModelId::SC:
      return sc_rules();
    case ModelId::TSO:
      return tso_rules();
    case ModelId::SRA:
      return sra_rules();
  }
  return sc_rules();
}

bool mo_total(const Derived& d) { return is_strict_total_on(d.mo, d.writes); }

std::optional<CycleHit> evaluate(const Rule& rule, const Derived& d,
                                 const std::string& id, bool want_path) {
  if (rule.tag == 'a') {
    if (mo_total(d)) return std::nullopt;
    CycleHit hit{id, {}};
    if (want_path) {
      if (auto c = find_cycle(d.mo)) hit.path = *c;
    }
    return hit;
  }
  const Chain chain = rule.chain(d);
  if (!want_path) {
    if (composition_irreflexive(chain)) return std::nullopt;
    return CycleHit{id, {}};
  }
  if (chain.size() == 1) {
    // hb is transitive; report a cycle through the generating po | rf.
    if (is_irreflexive(*chain.front())) return std::nullopt;
    return CycleHit{id, *find_cycle(d.po | d.rf)};
  }
  auto w = find_composed_cycle(chain);
  if (!w) return std::nullopt;
  return CycleHit{id, *w};
}

struct CatEntry {
  char tag;
  std::function<Chain(const Derived&)> chain;
};

const std::vector<CatEntry>& base_catalogue() {
  static const std::vector<CatEntry> c{
      {'a', [](const Derived&) { return Chain{}; }},
      {'b', [](const Derived& d) { return chain_of({&d.mo, &d.po}); }},
      {'c', [](const Derived& d) { return chain_of({&d.rfi, &d.po}); }},
      {'d', [](const Derived& d) { return chain_of({&d.rb, &d.po}); }},
      {'e', [](const Derived& d) { return chain_of({&d.rb, &d.rfe, &d.po}); }},
      {'f', [](const Derived& d) { return chain_of({&d.mo, &d.rfe, &d.po}); }},
      {'g', [](const Derived& d) {
         return chain_of({&d.rb, &d.hb, &d.rfe, &d.po});
       }},
      {'h', [](const Derived& d) { return chain_of({&d.rb, &d.mo}); }},
      {'i', [](const Derived& d) { return chain_of({&d.mo, &d.rf}); }},
      {'j', [](const Derived& d) {
         return chain_of({&d.rb, &d.mo_ext, &d.rfe, &d.po});
       }},
  };
  return c;
}

std::string cat_suffix(ModelId m) {
  switch (m) {
    case ModelId::SC:
      return "";
    case ModelId::TSO:
      return ".tso";
    case ModelId::SRA:
      return ".sra";
  }
  return "";
}

std::vector<CatEntry> catalogue_of(ModelId m) {
  std::vector<CatEntry> c = base_catalogue();
  if (m == ModelId::SRA) {
    c.pop_back();  // j
    return c;
  }
  if (m == ModelId::SC) {
    c.push_back({'k', [](const Derived& d) {
                   return chain_of({&d.rb, &d.mo, &d.po});
                 }});
  } else {
    c.push_back({'k', [](const Derived& d) {
                   return chain_of({&d.rb, &d.mo, &d.upd, &d.po});
                 }});
  }
  return c;
}

}  // namespace

RuleVerdict check_consistency(const Execution& e, ModelId m) {
  const Derived d = derive(e);
  RuleVerdict v;
  v.model = m;
  for (const Rule& r : rules_of(m)) {
    const std::string id = std::string(model_name(m)) + "." + r.tag;
    if (auto hit = evaluate(r, d, id, true)) v.violated.push_back(*hit);
  }
  return v;
}

bool is_consistent(const Derived& d, ModelId m) {
  if (!mo_total(d)) return false;
  if (!is_irreflexive(d.hb)) return false;
  if (!composition_irreflexive({&d.mo, &d.hb})) return false;
  if (!composition_irreflexive({&d.rb, &d.hb})) return false;
  if (!composition_irreflexive({&d.rb, &d.mo})) return false;
  switch (m) {
    case ModelId::SC:
      return composition_irreflexive({&d.rb, &d.mo, &d.hb});
    case ModelId::TSO:
      return composition_irreflexive({&d.rb, &d.mo, &d.rfe, &d.po}) &&
             composition_irreflexive({&d.rb, &d.mo, &d.upd, &d.po});
    case ModelId::SRA:
      return true;
  }
  return true;
}

bool is_consistent(const Execution& e, ModelId m) {
  return is_consistent(derive(e), m);
}

bool is_coherent(const Derived& d) {
  return mo_total(d) && is_irreflexive(d.hb) &&
         composition_irreflexive({&d.mo, &d.hb});
}

namespace {

enum class Check { Coherent, SC, TSO, SRA };

// Rule evaluation on raw rows for the enumeration inner loop, with mo total
// by construction and rf possibly partial.
class RowCheck {
 public:
  RowCheck(const PreTrace& t, Check kind) : t_(t), kind_(kind), n_(t.size()) {
    for (unsigned i = 0; i < n_; ++i) po_[i] = t.po.row(i);
  }

  void set_mo(const std::vector<unsigned>& order) {
    mo_.fill(0);
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (std::size_t j = i + 1; j < order.size(); ++j) mo_[order[i]] |= bit(order[j]);
    }
    EventMask before = 0;
    for (unsigned w : order) {
      mo_loc_[w] = mo_[w] & t_.loc_events[t_.loc_index[w]];
      mo_before_[w] = before;
      before |= bit(w);
    }
  }

  using Rows = std::array<EventMask, kMaxEvents>;

  // po closed under transitivity.
  Rows base_hb() const {
    Rows hb = po_;
    for (unsigned k = 0; k < n_; ++k) {
      for (unsigned i = 0; i < n_; ++i) {
        if ((hb[i] >> k) & 1u) hb[i] |= hb[k];
      }
    }
    return hb;
  }

  // Extends the closed relation `hb` with the edge w -> r. False when the
  // result is cyclic or contradicts mo.
  bool add_edge(Rows& hb, unsigned w, unsigned r) const {
    const EventMask reach = bit(r) | hb[r];
    EventMask pre = 0;
    for (unsigned i = 0; i < n_; ++i) {
      if (i == w || ((hb[i] >> w) & 1u)) {
        hb[i] |= reach;
        pre |= bit(i);
      }
    }
    if (pre & reach) return false;
    for (EventMask s = pre & t_.writes; s != 0; s &= s - 1) {
      if (mo_before_[std::countr_zero(s)] & reach) return false;
    }
    return true;
  }

  bool coherent(const Rows& hb) const {
    for (unsigned i = 0; i < n_; ++i) {
      if (hb[i] & bit(i)) return false;
    }
    for (EventMask s = t_.writes; s != 0; s &= s - 1) {
      const unsigned w = std::countr_zero(s);
      if (mo_before_[w] & hb[w]) return false;
    }
    return true;
  }

  // Rules beyond coherence for a coherent partial execution whose closed hb
  // is `hb`.
  bool ok(const Rows& hb, const std::array<int, kMaxEvents>& src) const {
    if (kind_ == Check::Coherent) return true;
    Rows rfe_po{};
    if (kind_ == Check::TSO) {
      for (EventMask s = t_.reads; s != 0; s &= s - 1) {
        const unsigned r = std::countr_zero(s);
        if (src[r] >= 0 && t_.events[static_cast<unsigned>(src[r])].tid != t_.events[r].tid) {
          rfe_po[static_cast<unsigned>(src[r])] |= po_[r];
        }
      }
    }
    for (EventMask s = t_.reads; s != 0; s &= s - 1) {
      const unsigned r = std::countr_zero(s);
      if (src[r] < 0) continue;
      const EventMask rb = mo_loc_[static_cast<unsigned>(src[r])] & ~bit(r);
      if (rb == 0) continue;
      if (image(hb, rb) & bit(r)) return false;
      const EventMask after_mo = image(mo_, rb);
      if (after_mo & bit(r)) return false;
      if (kind_ == Check::SC && (image(hb, after_mo) & bit(r))) return false;
      if (kind_ == Check::TSO) {
        if (image(rfe_po, after_mo) & bit(r)) return false;
        if (image(po_, after_mo & t_.updates) & bit(r)) return false;
      }
    }
    return true;
  }

 private:
  static EventMask image(const Rows& rel, EventMask from) {
    EventMask out = 0;
    for (; from != 0; from &= from - 1) out |= rel[std::countr_zero(from)];
    return out;
  }

  const PreTrace& t_;
  Check kind_;
  unsigned n_;
  Rows po_{};
  Rows mo_{};
  Rows mo_loc_{};
  Rows mo_before_{};
};

Check check_of(ModelId m) {
  switch (m) {
    case ModelId::SC:
      return Check::SC;
    case ModelId::TSO:
      return Check::TSO;
    case ModelId::SRA:
      return Check::SRA;
  }
  return Check::SC;
}

using Sources = std::array<int, kMaxEvents>;

void for_each_pruned(const std::shared_ptr<const PreTrace>& pt, Check kind,
                     const std::function<bool(const Execution&, const RowCheck::Rows&, const Sources&)>& visit,
                     EnumOptions opts, std::span<RowCheck* const> extra = {}) {
  const PreTrace& t = *pt;
  const unsigned program = t.size() - std::popcount(t.inits);
  if (program > opts.cap) {
    throw CapExceeded("pre-trace has " + std::to_string(program) +
                      " program events; the enumeration cap is " +
                      std::to_string(opts.cap));
  }
  std::vector<unsigned> inits, perm, reads;
  std::vector<EventMask> sources;
  for (unsigned i = 0; i < t.size(); ++i) {
    if (t.inits & bit(i)) inits.push_back(i);
    else if (t.writes & bit(i)) perm.push_back(i);
    if (t.reads & bit(i)) {
      reads.push_back(i);
      sources.push_back(t.writes & t.loc_events[t.loc_index[i]] & ~bit(i));
    }
  }
  RowCheck check(t, kind);
  Sources src;
  src.fill(-1);
  std::vector<RowCheck::Rows> hb(reads.size() + 1);
  hb[0] = check.base_hb();
  Execution e{pt, Rel(t.size()), Rel(t.size())};
  bool stop = false;
  // Candidates are cut as soon as a partial rf fails; every rule is
  // monotone in rf.
  std::function<void(std::size_t)> assign = [&](std::size_t k) {
    if (k == reads.size()) {
      stop = !visit(e, hb[k], src);
      return;
    }
    for (EventMask s = sources[k]; s != 0 && !stop; s &= s - 1) {
      const unsigned w = std::countr_zero(s);
      hb[k + 1] = hb[k];
      if (!check.add_edge(hb[k + 1], w, reads[k])) continue;
      src[reads[k]] = static_cast<int>(w);
      if (check.ok(hb[k + 1], src)) {
        e.rf.insert(w, reads[k]);
        assign(k + 1);
        e.rf.erase(w, reads[k]);
      }
      src[reads[k]] = -1;
    }
  };
  std::vector<unsigned> order = inits;
  order.resize(inits.size() + perm.size());
  do {
    std::copy(perm.begin(), perm.end(), order.begin() + static_cast<long>(inits.size()));
    check.set_mo(order);
    if (!check.coherent(hb[0])) continue;
    for (RowCheck* x : extra) x->set_mo(order);
    e.mo = order_relation(t.size(), order);
    assign(0);
  } while (!stop && std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace

void for_each_consistent(const std::shared_ptr<const PreTrace>& pt, ModelId m,
                         const std::function<void(const Execution&)>& visit,
                         EnumOptions opts) {
  for_each_pruned(
      pt, check_of(m),
      [&](const Execution& e, const RowCheck::Rows&, const Sources&) {
        visit(e);
        return true;
      },
      opts);
}

std::optional<Execution> find_consistent(
    const std::shared_ptr<const PreTrace>& pt, ModelId m,
    const std::function<bool(const Execution&)>& pred, EnumOptions opts) {
  std::optional<Execution> found;
  for_each_pruned(
      pt, check_of(m),
      [&](const Execution& e, const RowCheck::Rows&, const Sources&) {
        if (!pred(e)) return true;
        found = e;
        return false;
      },
      opts);
  return found;
}

void for_each_coherent(const std::shared_ptr<const PreTrace>& pt,
                       const std::function<void(const Execution&)>& visit,
                       EnumOptions opts) {
  for_each_pruned(
      pt, Check::Coherent,
      [&](const Execution& e, const RowCheck::Rows&, const Sources&) {
        visit(e);
        return true;
      },
      opts);
}

void for_each_classified(
    const std::shared_ptr<const PreTrace>& pt,
    const std::function<void(const Execution&, bool sc, bool tso)>& visit,
    EnumOptions opts) {
  RowCheck tso(*pt, Check::TSO);
  RowCheck sc(*pt, Check::SC);
  RowCheck* const extra[] = {&tso, &sc};
  for_each_pruned(
      pt, Check::SRA,
      [&](const Execution& e, const RowCheck::Rows& hb, const Sources& src) {
        const bool t = tso.ok(hb, src);
        visit(e, t && sc.ok(hb, src), t);
        return true;
      },
      opts, extra);
}

void for_each_coherent_verdicts(
    const std::shared_ptr<const PreTrace>& pt,
    const std::function<void(const Execution&, bool sc, bool tso, bool sra)>& visit,
    EnumOptions opts) {
  RowCheck sc(*pt, Check::SC);
  RowCheck tso(*pt, Check::TSO);
  RowCheck sra(*pt, Check::SRA);
  RowCheck* const extra[] = {&sc, &tso, &sra};
  for_each_pruned(
      pt, Check::Coherent,
      [&](const Execution& e, const RowCheck::Rows& hb, const Sources& src) {
        visit(e, sc.ok(hb, src), tso.ok(hb, src), sra.ok(hb, src));
        return true;
      },
      opts, extra);
}

std::vector<std::string> catalogue_ids(ModelId m) {
  std::vector<std::string> out;
  for (const CatEntry& c : catalogue_of(m)) {
    out.push_back(std::string("cat.") + c.tag + cat_suffix(m));
  }
  return out;
}

std::vector<CycleHit> catalogue_hits(const Derived& d, ModelId m) {
  std::vector<CycleHit> out;
  for (const CatEntry& c : catalogue_of(m)) {
    const std::string id = std::string("cat.") + c.tag + cat_suffix(m);
    if (auto hit = evaluate(Rule{c.tag, c.chain}, d, id, true)) {
      out.push_back(*hit);
    }
  }
  return out;
}

bool catalogue_tagged(const Derived& d, ModelId m) {
  for (const CatEntry& c : catalogue_of(m)) {
    if (evaluate(Rule{c.tag, c.chain}, d, std::string(), false)) return true;
  }
  return false;
}

std::vector<CycleHit> classify_min_cycles(const Execution& e, ModelId m) {
  const Derived d = derive(e);
  if (is_consistent(d, m)) {
    throw PreconditionError("execution is consistent under " +
                            std::string(model_name(m)));
  }
  return catalogue_hits(d, m);
}

bool has_rb_moext_po_cycle(const Derived& d) {
  return !composition_irreflexive({&d.rb, &d.mo_ext, &d.po});
}

bool sc_linearization_oracle(const Execution& e) {
  const PreTrace& pt = *e.pt;
  const unsigned n = pt.size();
  // Plain adjacency lists and a DFS, sharing nothing with derive().
  std::vector<std::vector<unsigned>> adj(n);
  auto add = [&](unsigned a, unsigned b) { adj[a].push_back(b); };
  for (unsigned a = 0; a < n; ++a) {
    for (unsigned b = 0; b < n; ++b) {
      if (pt.po.contains(a, b) || e.rf.contains(a, b) || e.mo.contains(a, b)) {
        add(a, b);
      }
    }
  }
  for (unsigned r = 0; r < n; ++r) {
    for (unsigned src = 0; src < n; ++src) {
      if (!e.rf.contains(src, r)) continue;
      for (unsigned w = 0; w < n; ++w) {
        if (w != r && e.mo.contains(src, w) &&
            pt.events[w].loc == pt.events[r].loc) {
          add(r, w);
        }
      }
    }
  }
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::function<bool(unsigned)> cyclic = [&](unsigned v) {
    state[v] = 1;
    for (unsigned w : adj[v]) {
      if (state[w] == 1) return true;
      if (state[w] == 0 && cyclic(w)) return true;
    }
    state[v] = 2;
    return false;
  };
  for (unsigned v = 0; v < n; ++v) {
    if (state[v] == 0 && cyclic(v)) return false;
  }
  return true;
}

namespace {

struct Machine {
  const PreTrace* pt;
  std::vector<std::vector<unsigned>> threads;  // event indices in po order
  std::vector<EventMask> cross_writes;         // per event
  std::vector<unsigned> thread_of;
};

struct MachineState {
  std::vector<std::uint8_t> pc;
  std::vector<std::vector<std::uint8_t>> buffer;
  std::vector<std::uint8_t> mem;   // per location: last flushed write
  std::vector<std::int8_t> src;    // per event: rf source or -1
  EventMask flushed = 0;           // writes that reached memory
  EventMask issued = 0;

  std::string key() const {
    std::string k(pc.begin(), pc.end());
    for (const auto& b : buffer) {
      k.push_back('|');
      k.append(b.begin(), b.end());
    }
    k.push_back('|');
    k.append(mem.begin(), mem.end());
    k.append(reinterpret_cast<const char*>(src.data()), src.size());
    return k;
  }
};

}  // namespace

std::set<Behavior> tso_store_buffer_oracle(const PreTrace& pt,
                                           unsigned max_events) {
  const unsigned program = pt.size() - std::popcount(pt.inits);
  if (program > max_events) {
    throw PreconditionError("store-buffer oracle supports at most " +
                            std::to_string(max_events) + " program events");
  }
  if (!thread_total(pt)) {
    throw PreconditionError("store-buffer oracle needs po total per thread");
  }
  Machine m;
  m.pt = &pt;
  m.thread_of.assign(pt.size(), 0);
  m.cross_writes.assign(pt.size(), 0);
  for (unsigned tid : pt.tids()) {
    m.threads.push_back(pt.thread_events(tid));
    for (unsigned e : m.threads.back()) {
      m.thread_of[e] = static_cast<unsigned>(m.threads.size() - 1);
    }
  }
  for (auto [a, b] : pt.po.pairs()) {
    if (pt.events[a].tid == pt.events[b].tid) continue;
    const auto& target = m.threads[m.thread_of[b]];
    for (unsigned e : target) {
      if (!pt.po.contains(a, e)) {
        throw PreconditionError(
            "cross-thread po from " + pt.events[a].label +
            " does not precede the whole thread of " + pt.events[b].label);
      }
    }
    if (pt.events[a].is_write()) m.cross_writes[b] |= bit(a);
  }

  std::set<Behavior> out;
  std::unordered_set<std::string> seen;
  MachineState init;
  init.pc.assign(m.threads.size(), 0);
  init.buffer.assign(m.threads.size(), {});
  init.mem.assign(pt.locs.size(), 0);
  init.src.assign(pt.size(), -1);
  for (std::size_t li = 0; li < pt.locs.size(); ++li) {
    const EventMask i = pt.inits & pt.loc_events[li];
    init.mem[li] = static_cast<std::uint8_t>(std::countr_zero(i));
    init.flushed |= i;
    init.issued |= i;
  }

  std::function<void(const MachineState&)> explore =
      [&](const MachineState& s) {
        if (!seen.insert(s.key()).second) return;
        bool terminal = true;
        for (std::size_t t = 0; t < m.threads.size(); ++t) {
          // Flush the oldest buffered write.
          if (!s.buffer[t].empty()) {
            terminal = false;
            const unsigned w = s.buffer[t].front();
            if ((m.cross_writes[w] & ~s.flushed) == 0) {
              MachineState n = s;
              n.buffer[t].erase(n.buffer[t].begin());
              n.mem[pt.loc_index[w]] = static_cast<std::uint8_t>(w);
              n.flushed |= bit(w);
              explore(n);
            }
          }
          if (s.pc[t] >= m.threads[t].size()) continue;
          terminal = false;
          const unsigned e = m.threads[t][s.pc[t]];
          const EventMask preds = pt.po.column(e) & ~pt.same_thread.column(e);
          if ((preds & ~s.issued) != 0) continue;
          const Event& ev = pt.events[e];
          const unsigned li = pt.loc_index[e];
          MachineState n = s;
          n.pc[t]++;
          n.issued |= bit(e);
          if (ev.kind == Kind::Write) {
            n.buffer[t].push_back(static_cast<std::uint8_t>(e));
          } else if (ev.kind == Kind::Read) {
            int own = -1;
            for (std::uint8_t w : s.buffer[t]) {
              if (pt.loc_index[w] == li) own = w;
            }
            if (own >= 0) {
              n.src[e] = static_cast<std::int8_t>(own);
            } else {
              if ((m.cross_writes[e] & pt.loc_events[li] & ~s.flushed) != 0) {
                continue;
              }
              n.src[e] = static_cast<std::int8_t>(s.mem[li]);
            }
          } else {
            if (!s.buffer[t].empty() || (m.cross_writes[e] & ~s.flushed) != 0) {
              continue;
            }
            n.src[e] = static_cast<std::int8_t>(s.mem[li]);
            n.mem[li] = static_cast<std::uint8_t>(e);
            n.flushed |= bit(e);
          }
          explore(n);
        }
        if (!terminal) return;
        Behavior b;
        for (unsigned r = 0; r < pt.size(); ++r) {
          if (s.src[r] >= 0) {
            b.rf.emplace(pt.events[static_cast<unsigned>(s.src[r])].label,
                         pt.events[r].label);
          }
        }
        for (std::size_t li = 0; li < pt.locs.size(); ++li) {
          b.final_writes[pt.locs[li]] = pt.events[s.mem[li]].label;
        }
        out.insert(std::move(b));
      };
  explore(init);
  return out;
}

std::set<Behavior> tso_axiomatic_behaviors(
    const std::shared_ptr<const PreTrace>& pt, EnumOptions opts) {
  std::set<Behavior> out;
  for_each_consistent(
      pt, ModelId::TSO,
      [&](const Execution& e) { out.insert(observable_behavior(e)); }, opts);
  return out;
}

std::vector<Execution> consistent_set(const std::shared_ptr<const PreTrace>& pt,
                                      ModelId m, EnumOptions opts) {
  std::vector<Execution> out;
  for_each_consistent(
      pt, m, [&](const Execution& e) { out.push_back(e); }, opts);
  return out;
}

std::vector<EventMask> crucial_sets(const Execution& e, ModelId m) {
  const PreTrace& pt = *e.pt;
  std::vector<unsigned> reads;
  for (EventMask s = pt.reads & e.rf.range(); s != 0; s &= s - 1) {
    reads.push_back(std::countr_zero(s));
  }
  const auto k = static_cast<unsigned>(reads.size());
  std::vector<EventMask> found;
  std::vector<std::pair<int, std::uint32_t>> subsets;
  for (std::uint32_t sub = 0; sub < (1u << k); ++sub) {
    subsets.emplace_back(std::popcount(sub), sub);
  }
  std::sort(subsets.begin(), subsets.end());
  for (auto [size, sub] : subsets) {
    EventMask drop = 0;
    for (unsigned i = 0; i < k; ++i) {
      if (sub & (1u << i)) drop |= bit(reads[i]);
    }
    bool superset = false;
    for (EventMask f : found) {
      if ((f & drop) == f) superset = true;
    }
    if (superset) continue;
    Rel rf = e.rf;
    for (unsigned r = 0; r < pt.size(); ++r) {
      if (drop & bit(r)) {
        for (EventMask col = rf.column(r); col != 0; col &= col - 1) {
          rf.erase(std::countr_zero(col), r);
        }
      }
    }
    if (is_consistent(derive(pt, rf, e.mo), m)) found.push_back(drop);
  }
  return found;
}

bool crucial_set_exists(const Execution& e, ModelId m) {
  return is_consistent(derive(*e.pt, Rel(e.pt->size()), e.mo), m);
}

namespace {

// Hypotheses (a)-(d) of the mo_ext flip for read rx on derived relations.
// Initialization writes happen before every program event for the flip.
Derived init_ordered(const Derived& d) {
  Derived v = d;
  v.hb |= Rel::product(d.hb.size(), d.inits, d.hb.universe() & ~d.inits);
  v.mo_ext = d.mo - v.hb;
  return v;
}

bool flip_hypotheses(const Derived& raw, unsigned rx, std::string* why) {
  const Derived d = init_ordered(raw);
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (!is_strict_total_on(d.mo, d.writes)) return fail("mo not strict total");
  if (!is_irreflexive(d.hb) || !composition_irreflexive({&d.mo, &d.hb})) {
    return fail("mo?;hb not irreflexive");
  }
  const EventMask src = d.rf.column(rx);
  if (src != 0) {
    const unsigned wx = std::countr_zero(src);
    // [wx];hb;[w'x] => not ([rx];rb;[w'x];hb cycle).
    for (EventMask s = d.hb.row(wx) & d.writes; s != 0; s &= s - 1) {
      const unsigned w2 = std::countr_zero(s);
      if (d.rb.contains(rx, w2) && d.hb.contains(w2, rx)) {
        return fail("[rx];rb;[w'x];hb cycle with w'x hb-after rx's source");
      }
    }
  }
  const Rel mo_in = d.mo - d.mo_ext;
  if (d.rb.row(rx) & mo_in.column(rx)) {
    return fail("[rx];rb;(mo \\ mo_ext) cycle");
  }
  return true;
}

}  // namespace

bool rwr_cycle(const Derived& raw, unsigned rx) {
  const Derived d = init_ordered(raw);
  const EventMask after_rb = d.rb.row(rx);
  const EventMask after_mo = after_rb | d.mo_ext.image(after_rb);
  const EventMask after_hb = after_mo | d.hb.image(after_mo);
  return (after_hb & bit(rx)) != 0;
}

bool flip_hypotheses_hold(const Execution& e, unsigned rx, std::string* why) {
  return flip_hypotheses(derive(e), rx, why);
}

bool flip_hypotheses_hold(const Derived& d, unsigned rx, std::string* why) {
  return flip_hypotheses(d, rx, why);
}

namespace {

// With `minimal` unset the first repair found is returned.
std::optional<Execution> flip_search(const Execution& e, unsigned rx,
                                     bool keep_source_prefix, bool minimal) {
  const PreTrace& pt = *e.pt;
  const Derived d = init_ordered(derive(e));
  std::string why;
  if (!flip_hypotheses(d, rx, &why)) {
    throw PreconditionError("flip hypotheses do not hold: " + why);
  }
  if (!rwr_cycle(d, rx)) return e;

  std::vector<unsigned> writes;
  for (EventMask s = pt.writes; s != 0; s &= s - 1) {
    writes.push_back(std::countr_zero(s));
  }
  const Rel keep = d.mo & d.hb;
  const int source = e.source(rx);
  const int src = keep_source_prefix ? source : -1;
  const EventMask loc_writes = pt.writes & pt.loc_events[pt.loc_index[rx]];
  const EventMask hb_to_rx = d.hb.column(rx);
  const EventMask hb_from_source =
      source >= 0 ? d.hb.row(static_cast<unsigned>(source)) & pt.writes : 0;
  std::array<EventMask, kMaxEvents> mo_rows{};
  // The hypotheses hold and the rwr cycle is gone under the mo in `order`.
  // hb does not depend on mo.
  auto repaired = [&](const std::vector<unsigned>& order) {
    EventMask after = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      mo_rows[*it] = after;
      after |= bit(*it);
    }
    if (source < 0) return true;
    const EventMask rb = mo_rows[static_cast<unsigned>(source)] & loc_writes & ~bit(rx);
    if (hb_from_source & rb & hb_to_rx) return false;
    for (EventMask s = rb & hb_to_rx; s != 0; s &= s - 1) {
      if (mo_rows[std::countr_zero(s)] & bit(rx)) return false;
    }
    EventMask after_mo = rb;
    for (EventMask s = rb; s != 0; s &= s - 1) {
      const unsigned w = std::countr_zero(s);
      after_mo |= mo_rows[w] & ~d.hb.row(w);
    }
    return ((after_mo | d.hb.image(after_mo)) & bit(rx)) == 0;
  };
  EventMask before_wx = 0;
  if (src >= 0) before_wx = e.mo.column(static_cast<unsigned>(src));
  const EventMask wx_bit = src >= 0 ? bit(static_cast<unsigned>(src)) : 0;

  std::optional<Execution> best;
  int best_flips = -1;
  std::vector<unsigned> order;
  EventMask placed = 0;

  std::function<void(int)> dfs = [&](int flips) {
    if (best_flips >= 0 && (!minimal || flips >= best_flips)) return;
    if (placed == pt.writes) {
      if (!repaired(order)) return;
      best = Execution{e.pt, e.rf, order_relation(pt.size(), order)};
      best_flips = flips;
      return;
    }
    for (unsigned w : writes) {
      if (placed & bit(w)) continue;
      if (keep.column(w) & ~placed) continue;
      // The set of writes mo-before rx's source is fixed.
      if (wx_bit != 0) {
        if (w == static_cast<unsigned>(src) && (before_wx & ~placed)) continue;
        if ((placed & wx_bit) && (before_wx & bit(w))) continue;
        if (!(placed & wx_bit) && w != static_cast<unsigned>(src) &&
            !(before_wx & bit(w))) {
          // w goes after the source; only allowed once the source is placed.
          continue;
        }
      }
      const int added = std::popcount(e.mo.row(w) & placed);
      order.push_back(w);
      placed |= bit(w);
      dfs(flips + added);
      placed &= ~bit(w);
      order.pop_back();
    }
  };
  dfs(0);
  return best;
}

}  // namespace

std::optional<Execution> flip_moext_witness(const Execution& e, unsigned rx,
                                            bool keep_source_prefix) {
  return flip_search(e, rx, keep_source_prefix, true);
}

bool moext_flip_exists(const Execution& e, unsigned rx, bool keep_source_prefix) {
  return flip_search(e, rx, keep_source_prefix, false).has_value();
}

}  // namespace portcheck
