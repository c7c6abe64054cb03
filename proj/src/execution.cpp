// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "portcheck/execution.hpp"

#include <algorithm>
#include <bit>

#include "portcheck/errors.hpp"

namespace portcheck {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::vector<unsigned> indices(EventMask m) {
  std::vector<unsigned> out;
  for (; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

EventMask sources_of(const PreTrace& pt, unsigned r) {
  return pt.writes & pt.loc_events[pt.loc_index[r]] & ~bit(r);
}

void check_cap(const PreTrace& pt, const EnumOptions& opts) {
  const unsigned program = pt.size() - std::popcount(pt.inits);
  if (program > opts.cap) {
    throw CapExceeded("pre-trace has " + std::to_string(program) +
                      " program events; the enumeration cap is " +
                      std::to_string(opts.cap));
  }
}

}  // namespace

int Execution::source(unsigned r) const {
  const EventMask col = rf.column(r);
  return col == 0 ? -1 : std::countr_zero(col);
}

std::vector<std::string> validate_execution(const Execution& e) {
  std::vector<std::string> report;
  if (!e.pt) return {"execution has no pre-trace"};
  const PreTrace& pt = *e.pt;
  if (e.rf.size() != pt.size() || e.mo.size() != pt.size()) {
    return {"rf/mo universe does not match the pre-trace"};
  }
  for (auto [w, r] : e.rf.pairs()) {
    const std::string pair = "(" + pt.events[w].label + ", " +
                             pt.events[r].label + ")";
    if (!(pt.writes & bit(w))) report.push_back("rf source is not a write " + pair);
    if (!(pt.reads & bit(r))) report.push_back("rf target is not a read " + pair);
    if (pt.loc_index[w] != pt.loc_index[r]) {
      report.push_back("rf pairs different locations " + pair);
    }
    if (w == r) report.push_back("update reads from itself " + pair);
  }
  for (unsigned r : indices(pt.reads)) {
    const int n = std::popcount(e.rf.column(r));
    if (n == 0) report.push_back("read without a source: " + pt.events[r].label);
    if (n > 1) report.push_back("read with several sources: " + pt.events[r].label);
  }
  if ((e.mo.domain() | e.mo.range()) & ~pt.writes) {
    report.push_back("mo relates a non-write");
  }
  if (!is_strict_total_on(e.mo, pt.writes)) {
    report.push_back("mo is not a strict total order over the writes");
  }
  for (EventMask loc : pt.loc_events) {
    const Rel mo_loc = restrict(e.mo, loc & pt.writes);
    if (!is_irreflexive(tclosure(mo_loc))) {
      report.push_back("mo is not strict on one location");
      break;
    }
  }
  return report;
}

std::uint64_t candidate_count(const PreTrace& pt) {
  std::uint64_t count = 1;
  for (unsigned r : indices(pt.reads)) {
    count *= static_cast<std::uint64_t>(std::popcount(sources_of(pt, r)));
  }
  const unsigned program_writes = std::popcount(pt.writes & ~pt.inits);
  for (unsigned k = 2; k <= program_writes; ++k) count *= k;
  return count;
}

CandidateStream::CandidateStream(std::shared_ptr<const PreTrace> pt,
                                 EnumOptions opts) {
  check_cap(*pt, opts);
  const PreTrace& t = *pt;
  inits_ = indices(t.writes & t.inits);
  perm_ = indices(t.writes & ~t.inits);
  reads_ = indices(t.reads);
  for (unsigned r : reads_) sources_.push_back(indices(sources_of(t, r)));
  pick_.assign(reads_.size(), 0);
  exec_.rf = Rel(t.size());
  exec_.mo = Rel(t.size());
  exec_.pt = std::move(pt);
  for (const auto& s : sources_) {
    if (s.empty()) done_ = true;
  }
}

void CandidateStream::load_mo() {
  order_ = inits_;
  order_.insert(order_.end(), perm_.begin(), perm_.end());
  exec_.mo = order_relation(exec_.pt->size(), order_);
}

void CandidateStream::load_rf() {
  Rel rf(exec_.pt->size());
  for (std::size_t k = 0; k < reads_.size(); ++k) {
    rf.insert(sources_[k][pick_[k]], reads_[k]);
  }
  exec_.rf = rf;
}

bool CandidateStream::next() {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    load_mo();
    load_rf();
    return true;
  }
  for (std::size_t k = reads_.size(); k > 0; --k) {
    if (++pick_[k - 1] < sources_[k - 1].size()) {
      load_rf();
      return true;
    }
    pick_[k - 1] = 0;
  }
  if (!std::next_permutation(perm_.begin(), perm_.end())) {
    done_ = true;
    return false;
  }
  load_mo();
  load_rf();
  return true;
}

void for_each_candidate(const std::shared_ptr<const PreTrace>& pt,
                        const std::function<void(const Execution&)>& visit,
                        EnumOptions opts) {
  CandidateStream s(pt, opts);
  while (s.next()) visit(s.current());
}

std::vector<Execution> enumerate_candidates(
    const std::shared_ptr<const PreTrace>& pt, EnumOptions opts) {
  std::vector<Execution> out;
  for_each_candidate(pt, [&](const Execution& e) { out.push_back(e); }, opts);
  return out;
}

Rel order_relation(unsigned size, const std::vector<unsigned>& order) {
  Rel r(size);
  EventMask later = 0;
  for (std::size_t k = order.size(); k > 0; --k) {
    r.set_row(order[k - 1], later);
    later |= bit(order[k - 1]);
  }
  return r;
}

std::vector<unsigned> mo_order(const Execution& e) {
  const PreTrace& pt = *e.pt;
  if (!is_strict_total_on(e.mo, pt.writes)) {
    throw ValidationError("mo is not a strict total order over the writes");
  }
  const Rel closed = tclosure(e.mo);
  std::vector<unsigned> order = indices(pt.writes);
  std::sort(order.begin(), order.end(), [&](unsigned a, unsigned b) {
    return std::popcount(closed.row(a)) > std::popcount(closed.row(b));
  });
  return order;
}

Rel complete_mo(const PreTrace& pt, const Rel& partial_mo) {
  if (partial_mo.size() != pt.size()) {
    throw UniverseMismatch("partial mo does not match the pre-trace");
  }
  if ((partial_mo.domain() | partial_mo.range()) & ~pt.writes) {
    throw PreconditionError("partial mo relates a non-write");
  }
  if (has_cycle(partial_mo)) throw PreconditionError("partial mo is cyclic");
  const Rel po_w = restrict(pt.po, pt.writes);
  const Rel closed = tclosure(partial_mo);
  if (!is_irreflexive(compose(closed, po_w))) {
    throw PreconditionError("partial mo conflicts with po");
  }
  const Rel constraints = tclosure(closed | po_w);
  if (!is_irreflexive(constraints)) {
    throw PreconditionError("partial mo and po admit no common total order");
  }
  std::vector<unsigned> order;
  EventMask placed = 0;
  const EventMask writes = pt.writes;
  while (placed != writes) {
    int best = -1;
    for (EventMask s = writes & ~placed; s != 0; s &= s - 1) {
      const unsigned w = std::countr_zero(s);
      if (constraints.column(w) & writes & ~placed) continue;
      if (best < 0) {
        best = static_cast<int>(w);
        continue;
      }
      const Event& a = pt.events[w];
      const Event& b = pt.events[best];
      if (std::make_pair(!a.is_init(), a.label) <
          std::make_pair(!b.is_init(), b.label)) {
        best = static_cast<int>(w);
      }
    }
    order.push_back(static_cast<unsigned>(best));
    placed |= bit(static_cast<unsigned>(best));
  }
  return order_relation(pt.size(), order);
}

Behavior observable_behavior(const Execution& e) {
  const PreTrace& pt = *e.pt;
  Behavior b;
  for (auto [w, r] : e.rf.pairs()) {
    b.rf.emplace(pt.events[w].label, pt.events[r].label);
  }
  for (std::size_t li = 0; li < pt.locs.size(); ++li) {
    const EventMask ws = pt.writes & pt.loc_events[li];
    for (EventMask s = ws; s != 0; s &= s - 1) {
      const unsigned w = std::countr_zero(s);
      if ((e.mo.row(w) & ws) == 0) {
        b.final_writes[pt.locs[li]] = pt.events[w].label;
        break;
      }
    }
  }
  return b;
}

bool behavior_equiv(const Execution& a, const Execution& b) {
  const PreTrace& pa = *a.pt;
  const PreTrace& pb = *b.pt;
  // Map a's indices of shared labels to b's.
  std::vector<int> to_b(pa.size(), -1);
  for (unsigned i = 0; i < pa.size(); ++i) {
    if (auto j = pb.find(pa.events[i].label)) to_b[i] = static_cast<int>(*j);
  }
  for (unsigned i = 0; i < pa.size(); ++i) {
    if (to_b[i] < 0) continue;
    for (unsigned j = 0; j < pa.size(); ++j) {
      if (to_b[j] < 0) continue;
      const auto bi = static_cast<unsigned>(to_b[i]);
      const auto bj = static_cast<unsigned>(to_b[j]);
      if (a.rf.contains(i, j) != b.rf.contains(bi, bj)) return false;
      if (a.mo.contains(i, j) != b.mo.contains(bi, bj)) return false;
    }
  }
  return true;
}

std::int64_t read_value(const Execution& e, unsigned r) {
  const int w = e.source(r);
  if (w < 0) {
    throw PreconditionError("read " + e.pt->events[r].label + " has no source");
  }
  return e.pt->events[static_cast<unsigned>(w)].wval.value_or(0);
}

ordered_json store_execution(const Execution& e) {
  ordered_json doc = store_pretrace(*e.pt);
  ordered_json rf = ordered_json::array();
  for (auto [w, r] : e.rf.pairs()) {
    rf.push_back({e.pt->events[w].label, e.pt->events[r].label});
  }
  doc["rf"] = std::move(rf);
  ordered_json mo = ordered_json::array();
  for (unsigned w : mo_order(e)) mo.push_back(e.pt->events[w].label);
  doc["mo"] = std::move(mo);
  return doc;
}

Execution load_execution(const json& doc) {
  Execution e;
  auto pt = std::make_shared<const PreTrace>(load_pretrace(doc));
  e.rf = Rel(pt->size());
  if (doc.contains("rf")) {
    for (const json& p : doc.at("rf")) {
      if (!p.is_array() || p.size() != 2) {
        throw ValidationError("rf entries must be [write, read] pairs");
      }
      e.rf.insert(pt->index_of(p[0].get<std::string>()),
                  pt->index_of(p[1].get<std::string>()));
    }
  }
  std::vector<unsigned> order;
  if (doc.contains("mo")) {
    for (const json& l : doc.at("mo")) {
      order.push_back(pt->index_of(l.get<std::string>()));
    }
  }
  // Initialization writes missing from the listed order go first.
  std::vector<unsigned> full;
  for (unsigned w : indices(pt->inits)) {
    if (std::find(order.begin(), order.end(), w) == order.end()) {
      full.push_back(w);
    }
  }
  full.insert(full.end(), order.begin(), order.end());
  e.mo = order_relation(pt->size(), full);
  e.pt = std::move(pt);
  auto report = validate_execution(e);
  if (!report.empty()) throw ValidationError("invalid execution: " + report.front());
  return e;
}

ordered_json store_behavior(const Behavior& b) {
  ordered_json doc;
  ordered_json rf = ordered_json::array();
  for (const auto& [w, r] : b.rf) rf.push_back({w, r});
  doc["rf"] = std::move(rf);
  ordered_json fin = ordered_json::object();
  for (const auto& [loc, w] : b.final_writes) fin[loc] = w;
  doc["final"] = std::move(fin);
  return doc;
}

}  // namespace portcheck
