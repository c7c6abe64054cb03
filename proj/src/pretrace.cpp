// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "portcheck/pretrace.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>

#include "portcheck/errors.hpp"

namespace portcheck {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view kind_code(Kind k) {
  switch (k) {
    case Kind::Read:
      return "R";
    case Kind::Write:
      return "W";
    case Kind::Update:
      return "U";
  }
  return "?";
}

Kind parse_kind(std::string_view code) {
  if (code == "R") return Kind::Read;
  if (code == "W") return Kind::Write;
  if (code == "U") return Kind::Update;
  throw ValidationError("unknown event kind '" + std::string(code) + "'");
}

std::optional<unsigned> PreTrace::find(std::string_view label) const {
  for (unsigned i = 0; i < events.size(); ++i) {
    if (events[i].label == label) return i;
  }
  return std::nullopt;
}

unsigned PreTrace::index_of(std::string_view label) const {
  if (auto i = find(label)) return *i;
  throw ValidationError("unknown event label '" + std::string(label) + "'");
}

std::vector<std::string> PreTrace::labels() const {
  std::vector<std::string> out;
  out.reserve(events.size());
  for (const Event& e : events) out.push_back(e.label);
  return out;
}

std::vector<unsigned> PreTrace::tids() const {
  std::set<unsigned> s;
  for (const Event& e : events) {
    if (!e.is_init()) s.insert(e.tid);
  }
  return {s.begin(), s.end()};
}

std::vector<unsigned> PreTrace::thread_events(unsigned tid) const {
  std::vector<unsigned> out;
  for (unsigned i = 0; i < size(); ++i) {
    if (events[i].tid == tid) out.push_back(i);
  }
  // Sort by the number of same-tid po predecessors.
  const EventMask mine = [&] {
    EventMask m = 0;
    for (unsigned i : out) m |= bit(i);
    return m;
  }();
  std::stable_sort(out.begin(), out.end(), [&](unsigned a, unsigned b) {
    return std::popcount(po.column(a) & mine) <
           std::popcount(po.column(b) & mine);
  });
  return out;
}

void PreTrace::finalize() {
  const unsigned n = size();
  std::set<std::string> loc_set;
  for (const Event& e : events) loc_set.insert(e.loc);
  locs.assign(loc_set.begin(), loc_set.end());
  loc_index.assign(n, 0);
  loc_events.assign(locs.size(), 0);
  reads = writes = updates = inits = 0;
  same_thread = Rel(n);
  same_loc = Rel(n);
  for (unsigned i = 0; i < n; ++i) {
    const Event& e = events[i];
    const auto li = static_cast<unsigned>(
        std::lower_bound(locs.begin(), locs.end(), e.loc) - locs.begin());
    loc_index[i] = li;
    loc_events[li] |= bit(i);
    if (e.is_read()) reads |= bit(i);
    if (e.is_write()) writes |= bit(i);
    if (e.kind == Kind::Update) updates |= bit(i);
    if (e.is_init()) inits |= bit(i);
  }
  for (unsigned i = 0; i < n; ++i) {
    for (unsigned j = 0; j < n; ++j) {
      if (i == j) continue;
      if (events[j].tid == events[i].tid) same_thread.insert(i, j);
      if (loc_index[j] == loc_index[i]) same_loc.insert(i, j);
    }
  }
}

PreTrace make_pretrace(std::vector<Event> program_events,
                       const std::vector<std::pair<unsigned, unsigned>>& po,
                       std::string path) {
  std::set<std::string> locs;
  std::set<std::string> have_init;
  std::set<std::string> seen_labels;
  for (const Event& e : program_events) {
    if (!seen_labels.insert(e.label).second) {
      throw ValidationError("duplicate event label '" + e.label + "'");
    }
    locs.insert(e.loc);
    if (e.is_init()) have_init.insert(e.loc);
  }
  // Inits first (by location), then the remaining events in input order.
  std::vector<Event> ordered;
  std::vector<unsigned> new_index(program_events.size());
  for (const std::string& loc : locs) {
    if (have_init.count(loc)) continue;
    Event init{init_label(loc), 0, Kind::Write, loc, 0, {}};
    if (seen_labels.count(init.label)) {
      throw ValidationError("label '" + init.label +
                            "' is reserved for the initialization of " + loc);
    }
    ordered.push_back(std::move(init));
  }
  std::vector<unsigned> given_inits;
  for (unsigned i = 0; i < program_events.size(); ++i) {
    if (program_events[i].is_init()) given_inits.push_back(i);
  }
  std::stable_sort(given_inits.begin(), given_inits.end(),
                   [&](unsigned a, unsigned b) {
                     return program_events[a].loc < program_events[b].loc;
                   });
  std::vector<Event> init_block;
  for (unsigned i : given_inits) init_block.push_back(program_events[i]);
  // Merge given and generated inits so the block stays location-sorted.
  init_block.insert(init_block.end(), ordered.begin(), ordered.end());
  std::stable_sort(init_block.begin(), init_block.end(),
                   [](const Event& a, const Event& b) { return a.loc < b.loc; });
  ordered = std::move(init_block);
  for (unsigned i : given_inits) {
    for (unsigned k = 0; k < ordered.size(); ++k) {
      if (ordered[k].label == program_events[i].label) new_index[i] = k;
    }
  }
  for (unsigned i = 0; i < program_events.size(); ++i) {
    if (program_events[i].is_init()) continue;
    new_index[i] = static_cast<unsigned>(ordered.size());
    ordered.push_back(std::move(program_events[i]));
  }
  if (ordered.size() > kMaxEvents) {
    throw CapExceeded("pre-trace has " + std::to_string(ordered.size()) +
                      " events; at most " + std::to_string(kMaxEvents) +
                      " are supported");
  }
  PreTrace pt;
  pt.events = std::move(ordered);
  pt.path = std::move(path);
  Rel gen(pt.size());
  for (auto [a, b] : po) {
    if (a >= new_index.size() || b >= new_index.size()) {
      throw ValidationError("po pair refers to a missing event");
    }
    gen.insert(new_index[a], new_index[b]);
  }
  pt.po = tclosure(gen);
  if (!is_irreflexive(pt.po)) {
    const auto cyc = find_cycle(gen);
    std::string msg = "po has a cycle:";
    for (unsigned i : *cyc) msg += " " + pt.events[i].label;
    throw ValidationError(msg);
  }
  pt.finalize();
  return pt;
}

std::vector<std::string> validate_pretrace(const PreTrace& pt) {
  std::vector<std::string> report;
  const unsigned n = pt.size();
  if (n > kMaxEvents) {
    report.push_back("more than " + std::to_string(kMaxEvents) + " events");
    return report;
  }
  if (pt.po.size() != n) {
    report.push_back("po universe does not match the event count");
    return report;
  }
  std::set<std::string> labels;
  for (const Event& e : pt.events) {
    if (e.label.empty()) report.push_back("event with empty label");
    if (!labels.insert(e.label).second) {
      report.push_back("duplicate label " + e.label);
    }
    if (e.loc.empty()) report.push_back(e.label + ": missing location");
    if (e.is_write() && !e.wval) {
      report.push_back(e.label + ": write without a value");
    }
    if (e.kind == Kind::Read && e.wval) {
      report.push_back(e.label + ": read carries a written value");
    }
    if (e.tid == 0 && (e.kind != Kind::Write || e.wval != 0)) {
      report.push_back(e.label + ": tid 0 is reserved for initialization");
    }
  }
  if (!is_irreflexive(pt.po)) report.push_back("po not irreflexive");
  if (!is_transitive(pt.po)) report.push_back("po not transitively closed");
  std::map<std::string, int> init_count;
  std::set<std::string> locs;
  for (unsigned i = 0; i < n; ++i) {
    const Event& e = pt.events[i];
    locs.insert(e.loc);
    if (!e.is_init()) continue;
    ++init_count[e.loc];
    if (pt.po.row(i) != 0 || pt.po.column(i) != 0) {
      report.push_back("initialization " + e.label + " ordered by po");
    }
  }
  for (const std::string& loc : locs) {
    const int c = init_count[loc];
    if (c == 0) report.push_back("missing initialization for " + loc);
    if (c > 1) report.push_back("multiple initializations for " + loc);
  }
  return report;
}

bool thread_total(const PreTrace& pt) {
  for (unsigned tid : pt.tids()) {
    EventMask mine = 0;
    for (unsigned i = 0; i < pt.size(); ++i) {
      if (pt.events[i].tid == tid) mine |= bit(i);
    }
    if (!is_strict_total_on(restrict(pt.po, mine), mine)) return false;
  }
  return true;
}

EventSets event_sets(const PreTrace& pt, std::optional<std::string_view> loc) {
  EventMask scope = pt.all();
  if (loc) {
    const auto it = std::lower_bound(pt.locs.begin(), pt.locs.end(), *loc);
    if (it == pt.locs.end() || *it != *loc) {
      throw ValidationError("unknown location '" + std::string(*loc) + "'");
    }
    scope = pt.loc_events[it - pt.locs.begin()];
  }
  return {scope, pt.writes & scope, pt.reads & scope, pt.updates & scope};
}

std::vector<std::string> mask_labels(const PreTrace& pt, EventMask mask) {
  std::vector<std::string> out;
  for (EventMask s = mask; s != 0; s &= s - 1) {
    out.push_back(pt.events[std::countr_zero(s)].label);
  }
  return out;
}

ordered_json store_pretrace(const PreTrace& pt) {
  ordered_json doc;
  ordered_json events = ordered_json::array();
  for (const Event& e : pt.events) {
    ordered_json ev;
    ev["label"] = e.label;
    ev["tid"] = e.tid;
    ev["kind"] = std::string(kind_code(e.kind));
    ev["loc"] = e.loc;
    if (e.wval) ev["val"] = *e.wval;
    if (!e.local.empty()) ev["local"] = e.local;
    events.push_back(std::move(ev));
  }
  doc["events"] = std::move(events);
  ordered_json po = ordered_json::array();
  for (auto [a, b] : pt.po.pairs()) {
    po.push_back({pt.events[a].label, pt.events[b].label});
  }
  doc["po"] = std::move(po);
  if (!pt.path.empty()) doc["path"] = pt.path;
  return doc;
}

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError(where + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

}  // namespace

PreTrace load_pretrace(const json& doc) {
  if (!doc.is_object()) throw ValidationError("pre-trace document must be an object");
  const json& evs = require(doc, "events", "pre-trace");
  if (!evs.is_array()) throw ValidationError("'events' must be an array");
  std::vector<Event> events;
  std::map<std::string, unsigned> index;
  for (std::size_t i = 0; i < evs.size(); ++i) {
    const json& j = evs[i];
    const std::string where = "event " + std::to_string(i);
    Event e;
    try {
      e.label = require(j, "label", where).get<std::string>();
      e.tid = require(j, "tid", where).get<unsigned>();
      e.kind = parse_kind(require(j, "kind", where).get<std::string>());
      e.loc = require(j, "loc", where).get<std::string>();
      if (j.contains("val")) e.wval = j.at("val").get<std::int64_t>();
      if (j.contains("local")) e.local = j.at("local").get<std::string>();
    } catch (const json::exception& ex) {
      throw ValidationError(where + ": " + ex.what());
    }
    if (e.is_write() && !e.wval) {
      if (e.is_init()) {
        e.wval = 0;
      } else {
        throw ValidationError(where + " (" + e.label + "): write without 'val'");
      }
    }
    if (e.kind == Kind::Read && e.wval) {
      throw ValidationError(where + " (" + e.label + "): read with 'val'");
    }
    if (e.is_init() && (e.kind != Kind::Write || *e.wval != 0)) {
      throw ValidationError(e.label + ": tid 0 is reserved for initialization");
    }
    if (!index.emplace(e.label, static_cast<unsigned>(events.size())).second) {
      throw ValidationError("duplicate event label '" + e.label + "'");
    }
    events.push_back(std::move(e));
  }
  std::vector<std::pair<unsigned, unsigned>> po;
  if (doc.contains("po")) {
    const json& pairs = doc.at("po");
    if (!pairs.is_array()) throw ValidationError("'po' must be an array");
    for (const json& p : pairs) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_string() ||
          !p[1].is_string()) {
        throw ValidationError("po entries must be [label, label] pairs");
      }
      const auto a = index.find(p[0].get<std::string>());
      const auto b = index.find(p[1].get<std::string>());
      if (a == index.end() || b == index.end()) {
        throw ValidationError("po refers to unknown label '" +
                              (a == index.end() ? p[0] : p[1]).get<std::string>() +
                              "'");
      }
      po.emplace_back(a->second, b->second);
    }
  }
  std::string path = doc.value("path", std::string{});
  PreTrace pt = make_pretrace(std::move(events), po, std::move(path));
  auto report = validate_pretrace(pt);
  if (!report.empty()) throw ValidationError("invalid pre-trace: " + report.front());
  return pt;
}

std::string describe(const Event& e) {
  std::string s = e.label + "(" + std::string(kind_code(e.kind)) + " " + e.loc;
  if (e.wval) s += "=" + std::to_string(*e.wval);
  return s + ")";
}

}  // namespace portcheck
