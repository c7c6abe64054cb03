// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PORTCHECK_PRETRACE_HPP_
#define PORTCHECK_PRETRACE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "portcheck/relation.hpp"

namespace portcheck {

enum class Kind : std::uint8_t { Read, Write, Update };

std::string_view kind_code(Kind k);  // "R", "W", "U"
Kind parse_kind(std::string_view code);

struct Event {
  std::string label;
  unsigned tid = 0;
  Kind kind = Kind::Write;
  std::string loc;
  std::optional<std::int64_t> wval;
  /// Name of the local a read or update stores into, if known.
  std::string local;

  bool is_read() const { return kind != Kind::Write; }
  bool is_write() const { return kind != Kind::Read; }
  bool is_init() const { return tid == 0; }

  bool operator==(const Event&) const = default;
};

inline std::string init_label(std::string_view loc) {
  return "init_" + std::string(loc);
}

/// Conditional-free program fragment: events plus a strict partial po.
///
/// Built through make_pretrace, which materializes initialization writes,
/// places them first (ordered by location), closes po and fills the
/// per-event masks. Event indices are the relation universe.
struct PreTrace {
  std::vector<Event> events;
  Rel po;
  /// Branch choices that produced this pre-trace, e.g. "T1=L;T2=".
  std::string path;

  // Derived by finalize().
  std::vector<std::string> locs;        // sorted
  std::vector<unsigned> loc_index;      // per event
  std::vector<EventMask> loc_events;    // per location
  EventMask reads = 0;                  // includes updates
  EventMask writes = 0;                 // includes updates and inits
  EventMask updates = 0;
  EventMask inits = 0;
  /// Pairs of distinct events on the same thread / the same location.
  Rel same_thread;
  Rel same_loc;

  unsigned size() const { return static_cast<unsigned>(events.size()); }
  EventMask all() const { return po.universe(); }
  std::optional<unsigned> find(std::string_view label) const;
  unsigned index_of(std::string_view label) const;  // throws
  std::vector<std::string> labels() const;
  /// Distinct program tids in ascending order.
  std::vector<unsigned> tids() const;
  /// Events of one tid in po order (po restricted to the tid is assumed total).
  std::vector<unsigned> thread_events(unsigned tid) const;

  /// Recomputes the derived fields from events and po.
  void finalize();
};

/// Builds a pre-trace from program events and generating po pairs (by
/// index into `program_events`). Initialization writes are added for every
/// referenced location that lacks one. Throws ValidationError on duplicate
/// labels, a po cycle or more than kMaxEvents events.
PreTrace make_pretrace(std::vector<Event> program_events,
                       const std::vector<std::pair<unsigned, unsigned>>& po,
                       std::string path = {});

/// Every violated invariant, one message per finding. Empty iff valid.
std::vector<std::string> validate_pretrace(const PreTrace& pt);

/// True when po restricted to each program tid is a strict total order.
bool thread_total(const PreTrace& pt);

struct EventSets {
  EventMask st = 0, w = 0, r = 0, u = 0;
};

/// st, w, r, u, optionally restricted to one location (throws
/// ValidationError for an unknown location).
EventSets event_sets(const PreTrace& pt,
                     std::optional<std::string_view> loc = std::nullopt);

/// Labels of the events in `mask`, in index order.
std::vector<std::string> mask_labels(const PreTrace& pt, EventMask mask);

nlohmann::ordered_json store_pretrace(const PreTrace& pt);
PreTrace load_pretrace(const nlohmann::json& doc);

/// Pretty label for diagnostics: "label(W x=1)".
std::string describe(const Event& e);

}  // namespace portcheck

#endif  // PORTCHECK_PRETRACE_HPP_
