// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PORTCHECK_PORTABILITY_HPP_
#define PORTCHECK_PORTABILITY_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "portcheck/corpus.hpp"
#include "portcheck/effects.hpp"
#include "portcheck/execution.hpp"
#include "portcheck/model_id.hpp"

namespace portcheck {

struct PortVerdict {
  ModelId target = ModelId::TSO;
  bool guard_passes = true;
  std::vector<std::string> guard_reasons;  // e.g. "tuwri (T3..0, T4..0, T4..1, T2..0)"
  bool sc_safe = true;
  bool target_safe = true;
  /// Target-consistent execution of P' without a match in P, reported when
  /// the effect is SC-safe but not target-safe.
  std::optional<Execution> counterexample;

  bool portable() const { return !sc_safe || target_safe; }
  bool theorem_violation() const { return guard_passes && !portable(); }
};

/// Guard and empirical portability of p -> p2 from SC to `target` (TSO or
/// SRA). The TSO guard rules out wi, we and tuwri; the SRA guard wi and we.
PortVerdict port_check(const std::shared_ptr<const PreTrace>& p,
                       const std::shared_ptr<const PreTrace>& p2, ModelId target,
                       EnumOptions opts = {});

nlohmann::ordered_json store_verdict(const PortVerdict& v);

enum class Template { Swap, Eliminate, Introduce, Inline };

std::string_view template_name(Template t);
Template parse_template(std::string_view name);

struct SearchBounds {
  unsigned max_threads = 3;
  unsigned max_events = 6;
  unsigned locations = 2;
  std::vector<std::int64_t> values = {0, 1};
  std::vector<Template> templates = {Template::Swap, Template::Eliminate,
                                     Template::Introduce, Template::Inline};
  /// Wall-clock budget for the whole search; 0 disables it.
  double budget_seconds = 600;
  unsigned jobs = 1;
};

/// Reads bounds from a JSON object; absent keys keep their defaults.
SearchBounds load_bounds(const nlohmann::json& doc);
nlohmann::ordered_json store_bounds(const SearchBounds& b);

/// Programs of the bounded space, one pre-trace each, canonical up to
/// thread order and location renaming, in generation order.
std::vector<std::shared_ptr<const PreTrace>> bounded_programs(const SearchBounds& b);

/// Transformed pre-traces obtained from `p` by one template application,
/// labels preserved. Names identify the application, e.g. "swap T1..0 T1..1".
struct Variant {
  std::string name;
  Template kind;
  std::shared_ptr<const PreTrace> target;
};
std::vector<Variant> apply_templates(const PreTrace& p,
                                     const std::vector<Template>& templates);

struct ClaimTally {
  std::uint64_t checked = 0;
  std::uint64_t violated = 0;
};

struct SearchReport {
  SearchBounds bounds;
  bool complete = true;
  std::uint64_t programs = 0;
  std::uint64_t pairs = 0;
  std::uint64_t executions = 0;
  std::map<std::string, std::uint64_t> template_pairs;
  std::map<std::string, ClaimTally> claims;
  /// Violating instances, at most a few per claim, in search order.
  std::vector<nlohmann::ordered_json> violations;

  bool violated() const;
};

/// Checks every claim on every program and template application within
/// `bounds`. Deterministic for fixed bounds whatever the job count.
SearchReport theorem_search(const SearchBounds& bounds);

nlohmann::ordered_json store_search_report(const SearchReport& r);

struct AuditEntry {
  std::string source;
  std::string path;
  std::uint64_t sc = 0, tso = 0, sra = 0;
  bool sc_in_tso = true, tso_in_sra = true;
  unsigned threads = 0;
  bool has_updates = false;
};

/// Consistent-set sizes per pre-trace and whether SC <= TSO <= SRA holds
/// execution by execution.
std::vector<AuditEntry> weakness_audit(const std::vector<SourceFile>& corpus,
                                       EnumOptions opts = {});

nlohmann::ordered_json store_audit(const std::vector<AuditEntry>& entries);

}  // namespace portcheck

#endif  // PORTCHECK_PORTABILITY_HPP_
