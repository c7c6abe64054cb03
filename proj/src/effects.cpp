// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "portcheck/effects.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "portcheck/errors.hpp"
#include "portcheck/models.hpp"

namespace portcheck {

using nlohmann::ordered_json;

EventMask Effect::shared() const {
  EventMask m = 0;
  for (unsigned i = 0; i < size(); ++i) {
    if (in_source[i] >= 0 && in_target[i] >= 0) m |= bit(i);
  }
  return m;
}

std::vector<std::string> Effect::labels(EventMask m) const {
  std::vector<std::string> out;
  for (; m != 0; m &= m - 1) out.push_back(events[std::countr_zero(m)].label);
  return out;
}

std::vector<LabelPair> Effect::label_pairs(const Rel& r) const {
  std::vector<LabelPair> out;
  for (auto [a, b] : r.pairs()) out.emplace_back(events[a].label, events[b].label);
  return out;
}

Effect diff_effect(const PreTrace& p, const PreTrace& p2) {
  Effect eff;
  for (unsigned i = 0; i < p.size(); ++i) {
    const Event& e = p.events[i];
    eff.events.push_back(e);
    eff.in_source.push_back(static_cast<int>(i));
    const auto j = p2.find(e.label);
    eff.in_target.push_back(j ? static_cast<int>(*j) : -1);
    if (!j) continue;
    const Event& f = p2.events[*j];
    if (e.kind != f.kind || e.loc != f.loc ||
        (e.is_write() && e.wval != f.wval)) {
      throw ValidationError("incompatible shared label " + e.label + ": " +
                            describe(e) + " vs " + describe(f));
    }
  }
  for (unsigned j = 0; j < p2.size(); ++j) {
    if (p.find(p2.events[j].label)) continue;
    eff.events.push_back(p2.events[j]);
    eff.in_source.push_back(-1);
    eff.in_target.push_back(static_cast<int>(j));
  }
  if (eff.size() > kMaxEvents) {
    throw CapExceeded("effect spans " + std::to_string(eff.size()) +
                      " events; at most " + std::to_string(kMaxEvents) +
                      " are supported");
  }
  const unsigned n = eff.size();
  eff.po_source = Rel(n);
  eff.po_target = Rel(n);
  std::vector<unsigned> from_target(p2.size());
  for (unsigned i = 0; i < n; ++i) {
    if (eff.in_source[i] < 0) eff.st_plus |= bit(i);
    if (eff.in_target[i] < 0) eff.st_minus |= bit(i);
    if (eff.in_target[i] >= 0) from_target[static_cast<unsigned>(eff.in_target[i])] = i;
  }
  for (auto [a, b] : p.po.pairs()) eff.po_source.insert(a, b);
  for (auto [a, b] : p2.po.pairs()) eff.po_target.insert(from_target[a], from_target[b]);
  eff.po_minus = eff.po_source - eff.po_target;
  eff.po_plus = eff.po_target - eff.po_source;
  return eff;
}

namespace {

bool unordered(const Rel& po, unsigned a, unsigned b) {
  return !po.contains(a, b) && !po.contains(b, a);
}

struct TuwriMatcher {
  const Effect& eff;
  EventMask updates = 0;  // joint indices of updates on either side

  bool constraint1(unsigned w_y, unsigned r_y, unsigned r_x) const {
    return eff.po_plus.contains(w_y, r_y) && eff.po_plus.contains(w_y, r_x) &&
           !eff.po_minus.contains(r_y, r_x);
  }

  bool constraint2(unsigned w_x, unsigned w_y, unsigned r_x) const {
    if ((bit(w_x) | bit(w_y) | bit(r_x)) & eff.st_minus) return false;
    const Rel& plus = eff.po_plus;
    return !plus.contains(w_x, r_x) && !plus.contains(r_x, w_x) &&
           !plus.contains(w_x, w_y) && !plus.contains(w_y, w_x);
  }

  bool constraint3(unsigned w_y, unsigned r_x, EventMask x_writes) const {
    const EventMask source_side = (x_writes | updates) & ~eff.st_plus;
    const EventMask between_source =
        eff.po_source.row(w_y) & eff.po_source.column(r_x) & source_side;
    if (between_source & ~eff.po_minus.column(r_x)) return false;
    const EventMask candidates = x_writes | updates | eff.st_plus;
    const EventMask between_plus =
        eff.po_plus.row(w_y) & eff.po_plus.column(r_x) & candidates;
    return between_plus == 0;
  }
};

}  // namespace

EffectClass classify_effect(const PreTrace& /*p*/, const PreTrace& /*p2*/,
                            const Effect& eff) {
  EffectClass c;
  const unsigned n = eff.size();
  const EventMask shared = eff.shared();
  EventMask reads = 0, writes = 0, updates = 0;
  for (unsigned i = 0; i < n; ++i) {
    const Event& e = eff.events[i];
    if (e.is_read()) reads |= bit(i);
    if (e.is_write() && !e.is_init()) writes |= bit(i);
    if (e.kind == Kind::Update) updates |= bit(i);
  }
  c.introduced_writes = eff.labels(eff.st_plus & writes);
  c.eliminated_writes = eff.labels(eff.st_minus & writes);
  c.wi = !c.introduced_writes.empty();
  c.we = !c.eliminated_writes.empty();

  auto same_loc = [&](unsigned a, unsigned b) {
    return eff.events[a].loc == eff.events[b].loc;
  };
  // De-ordered pairs: ordered in P, no longer ordered in P', neither gone.
  for (auto [a, b] : eff.po_minus.pairs()) {
    if ((bit(a) | bit(b)) & eff.st_minus) continue;
    if ((writes & bit(a)) && (writes & bit(b))) {
      c.ww_pairs.emplace_back(eff.events[a].label, eff.events[b].label);
    }
    if (!same_loc(a, b)) continue;
    const bool ra = reads & bit(a), rb = reads & bit(b);
    const bool wa = writes & bit(a), wb = writes & bit(b);
    if (wa && rb) c.wr_pairs.emplace_back(eff.events[a].label, eff.events[b].label);
    if (ra && wb) c.rw_pairs.emplace_back(eff.events[a].label, eff.events[b].label);
    if (ra && rb) c.rr_pairs.emplace_back(eff.events[a].label, eff.events[b].label);
  }
  c.ww_deord = !c.ww_pairs.empty();
  c.same_loc_wr_deord = !c.wr_pairs.empty();
  c.same_loc_rw_deord = !c.rw_pairs.empty();
  c.same_loc_rr_deord = !c.rr_pairs.empty();

  TuwriMatcher m{eff, updates};
  std::vector<EventMask> loc_writes(n, 0);
  for (unsigned i = 0; i < n; ++i) {
    for (unsigned j = 0; j < n; ++j) {
      if ((writes & bit(j)) && same_loc(i, j)) loc_writes[i] |= bit(j);
    }
  }
  const Rel& po = eff.po_source;
  const Rel& po2 = eff.po_target;
  for (EventMask sy = writes & shared; sy != 0; sy &= sy - 1) {
    const unsigned w_y = std::countr_zero(sy);
    for (EventMask sr = reads & shared; sr != 0; sr &= sr - 1) {
      const unsigned r_x = std::countr_zero(sr);
      if (r_x == w_y || same_loc(r_x, w_y)) continue;
      for (EventMask sx = loc_writes[r_x] & shared; sx != 0; sx &= sx - 1) {
        const unsigned w_x = std::countr_zero(sx);
        if (w_x == r_x || w_x == w_y) continue;
        if (!m.constraint2(w_x, w_y, r_x)) continue;
        if (!m.constraint3(w_y, r_x, loc_writes[r_x])) continue;
        const std::string& ly = eff.events[w_y].label;
        const std::string& lr = eff.events[r_x].label;
        const std::string& lx = eff.events[w_x].label;
        // Pattern 1: w_y inlined ahead of two po-ordered reads.
        if (unordered(po, w_y, w_x) && unordered(po, w_x, r_x)) {
          for (EventMask sry = reads & shared; sry != 0; sry &= sry - 1) {
            const unsigned r_y = std::countr_zero(sry);
            if (r_y == w_y || r_y == r_x || r_y == w_x) continue;
            if (!same_loc(r_y, w_y)) continue;
            if (!po.contains(r_y, r_x)) continue;
            if (!unordered(po, w_y, r_y) || !unordered(po, w_x, r_y)) continue;
            if (!m.constraint1(w_y, r_y, r_x)) continue;
            c.tuwri_witnesses.push_back({ly, eff.events[r_y].label, lr, lx, 1});
          }
        }
        // Pattern 2: w_y newly ordered before the racing read.
        if (po2.contains(w_y, r_x) && eff.po_plus.contains(w_y, r_x) &&
            unordered(po2, w_x, w_y) && unordered(po2, w_x, r_x)) {
          c.tuwri_witnesses.push_back({ly, "", lr, lx, 2});
        }
      }
    }
  }
  std::sort(c.tuwri_witnesses.begin(), c.tuwri_witnesses.end());
  c.tuwri = !c.tuwri_witnesses.empty();
  return c;
}

EffectClass classify_effect(const PreTrace& p, const PreTrace& p2) {
  return classify_effect(p, p2, diff_effect(p, p2));
}

BehaviorKey::BehaviorKey(const Effect& eff, bool target) {
  const std::vector<int>& side = target ? eff.in_target : eff.in_source;
  shared_ = eff.shared();
  for (unsigned j = 0; j < eff.size(); ++j) {
    if (side[j] < 0) continue;
    const auto i = static_cast<unsigned>(side[j]);
    if (to_joint_.size() <= i) to_joint_.resize(i + 1, -1);
    to_joint_[i] = static_cast<int>(j);
    if (shared_ & bit(j)) {
      if (eff.events[j].is_read()) reads_.push_back(i);
      if (eff.events[j].is_write()) {
        writes_.push_back(i);
        write_mask_ |= bit(i);
      }
    }
  }
}

std::string BehaviorKey::operator()(const Execution& e) const {
  std::string k;
  k.reserve(reads_.size() + writes_.size() + 1);
  for (unsigned r : reads_) {
    const int s = e.source(r);
    const int j = s < 0 ? -1 : to_joint_[static_cast<unsigned>(s)];
    k.push_back(j >= 0 && (shared_ & bit(static_cast<unsigned>(j)))
                    ? static_cast<char>(j)
                    : '\x7f');
  }
  k.push_back('|');
  std::string order(writes_.size(), '\0');
  for (unsigned w : writes_) {
    const auto pos = std::popcount(e.mo.column(w) & write_mask_);
    order[static_cast<std::size_t>(pos)] = static_cast<char>(to_joint_[w]);
  }
  return k + order;
}

SafetyResult is_safe_effect(const std::shared_ptr<const PreTrace>& p,
                            const std::shared_ptr<const PreTrace>& p2,
                            ModelId m, EnumOptions opts) {
  const Effect eff = diff_effect(*p, *p2);
  const BehaviorKey source(eff, false);
  const BehaviorKey target(eff, true);
  std::unordered_set<std::string> keys;
  for_each_consistent(
      p, m, [&](const Execution& e) { keys.insert(source(e)); }, opts);
  SafetyResult r;
  r.counterexample = find_consistent(
      p2, m, [&](const Execution& e) { return !keys.contains(target(e)); },
      opts);
  r.safe = !r.counterexample.has_value();
  return r;
}

std::vector<TriangularRace> detect_triangular_race(const Execution& e) {
  const PreTrace& pt = *e.pt;
  std::vector<TriangularRace> out;
  const EventMask racing = pt.writes & ~pt.inits;
  for (EventMask sx = racing; sx != 0; sx &= sx - 1) {
    const unsigned w_x = std::countr_zero(sx);
    const Event& wx = pt.events[w_x];
    const EventMask x_events = pt.loc_events[pt.loc_index[w_x]];
    for (EventMask sr = pt.reads & x_events & ~bit(w_x); sr != 0; sr &= sr - 1) {
      const unsigned r_x = std::countr_zero(sr);
      const Event& rx = pt.events[r_x];
      if (wx.tid == rx.tid) continue;                     // (b)
      if (e.source(r_x) == static_cast<int>(w_x)) continue;  // (f)
      for (EventMask sy = pt.writes & ~x_events & pt.po.column(r_x); sy != 0;
           sy &= sy - 1) {
        const unsigned w_y = std::countr_zero(sy);
        if (pt.events[w_y].tid != rx.tid) continue;          // (c)
        if (!e.mo.contains(w_x, w_y)) continue;              // (e)
        const EventMask before = pt.po.column(w_y) & pt.writes & x_events;
        if (before & ~e.mo.column(w_x)) continue;            // (g)
        out.push_back({wx.label, rx.label, pt.events[w_y].label});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool check_atr_shape(const Execution& e, const TriangularRace& w) {
  if (!is_consistent(e, ModelId::TSO)) {
    throw PreconditionError("execution is not TSO-consistent");
  }
  const auto races = detect_triangular_race(e);
  if (!std::binary_search(races.begin(), races.end(), w)) {
    throw PreconditionError("not a triangular race of this execution");
  }
  const PreTrace& pt = *e.pt;
  const unsigned w_y = pt.index_of(w.w_y);
  const unsigned r_x = pt.index_of(w.r_x);
  const EventMask between = pt.po.row(w_y) & pt.po.column(r_x);
  const EventMask x_writes = pt.writes & pt.loc_events[pt.loc_index[r_x]];
  return (between & (x_writes | pt.updates)) == 0;
}

std::optional<IntroducedRace> introduces_tr(
    const std::shared_ptr<const PreTrace>& p,
    const std::shared_ptr<const PreTrace>& p2, EnumOptions opts) {
  const Effect eff = diff_effect(*p, *p2);
  const BehaviorKey source(eff, false);
  const BehaviorKey target(eff, true);
  std::unordered_map<std::string, std::set<TriangularRace>> races;
  for_each_consistent(
      p, ModelId::TSO,
      [&](const Execution& e) {
        auto& slot = races[source(e)];
        for (auto& r : detect_triangular_race(e)) slot.insert(std::move(r));
      },
      opts);
  std::optional<IntroducedRace> found;
  find_consistent(
      p2, ModelId::TSO,
      [&](const Execution& e) {
        const auto mine = detect_triangular_race(e);
        if (mine.empty()) return false;
        const auto it = races.find(target(e));
        for (const TriangularRace& r : mine) {
          if (it == races.end() || !it->second.contains(r)) {
            found = IntroducedRace{e, r};
            return true;
          }
        }
        return false;
      },
      opts);
  return found;
}

ordered_json store_effect(const Effect& eff) {
  ordered_json doc;
  doc["st_minus"] = eff.labels(eff.st_minus);
  doc["st_plus"] = eff.labels(eff.st_plus);
  auto pairs = [&](const Rel& r) {
    ordered_json a = ordered_json::array();
    for (const auto& [x, y] : eff.label_pairs(r)) a.push_back({x, y});
    return a;
  };
  doc["po_minus"] = pairs(eff.po_minus);
  doc["po_plus"] = pairs(eff.po_plus);
  return doc;
}

ordered_json store_effect_class(const EffectClass& c) {
  auto pairs = [](const std::vector<LabelPair>& v) {
    ordered_json a = ordered_json::array();
    for (const auto& [x, y] : v) a.push_back({x, y});
    return a;
  };
  ordered_json doc;
  doc["wi"] = c.wi;
  doc["we"] = c.we;
  doc["tuwri"] = c.tuwri;
  doc["ww_deord"] = c.ww_deord;
  doc["same_loc_wr_deord"] = c.same_loc_wr_deord;
  doc["same_loc_rw_deord"] = c.same_loc_rw_deord;
  doc["same_loc_rr_deord"] = c.same_loc_rr_deord;
  doc["introduced_writes"] = c.introduced_writes;
  doc["eliminated_writes"] = c.eliminated_writes;
  ordered_json tw = ordered_json::array();
  for (const TuwriWitness& w : c.tuwri_witnesses) {
    ordered_json o;
    o["pattern"] = w.pattern;
    o["w_y"] = w.w_y;
    if (!w.r_y.empty()) o["r_y"] = w.r_y;
    o["r_x"] = w.r_x;
    o["w_x"] = w.w_x;
    tw.push_back(std::move(o));
  }
  doc["tuwri_witnesses"] = std::move(tw);
  doc["ww_pairs"] = pairs(c.ww_pairs);
  doc["wr_pairs"] = pairs(c.wr_pairs);
  doc["rw_pairs"] = pairs(c.rw_pairs);
  doc["rr_pairs"] = pairs(c.rr_pairs);
  return doc;
}

ordered_json store_race(const TriangularRace& r) {
  ordered_json doc;
  doc["w_x"] = r.w_x;
  doc["r_x"] = r.r_x;
  doc["w_y"] = r.w_y;
  return doc;
}

}  // namespace portcheck
