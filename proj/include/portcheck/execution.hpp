// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PORTCHECK_EXECUTION_HPP_
#define PORTCHECK_EXECUTION_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "portcheck/model_id.hpp"
#include "portcheck/pretrace.hpp"
#include "portcheck/relation.hpp"

namespace portcheck {

/// A pre-trace annotated with reads-from (write -> read) and memory order.
struct Execution {
  std::shared_ptr<const PreTrace> pt;
  Rel rf;
  Rel mo;

  const PreTrace& trace() const { return *pt; }
  /// rf source of event `r`, or -1 if it has none.
  int source(unsigned r) const;
};

/// Candidate-execution conditions that `e` violates. Empty iff valid.
std::vector<std::string> validate_execution(const Execution& e);

struct EnumOptions {
  /// Maximum number of program (non-initialization) events.
  unsigned cap = 12;
};

/// Number of candidates enumerate_candidates produces for `pt`.
std::uint64_t candidate_count(const PreTrace& pt);

/// Streams candidate executions in a fixed order: non-init write
/// permutations (lexicographic) outermost, rf choices as an odometer with
/// the last read varying fastest. Initialization writes form an mo-prefix
/// and no update reads from itself.
class CandidateStream {
 public:
  CandidateStream(std::shared_ptr<const PreTrace> pt, EnumOptions opts = {});

  /// Advances to the next candidate; false once exhausted.
  bool next();
  const Execution& current() const { return exec_; }
  /// Order of all writes in the current mo.
  const std::vector<unsigned>& mo_order() const { return order_; }

 private:
  void load_mo();
  void load_rf();

  Execution exec_;
  std::vector<unsigned> inits_;
  std::vector<unsigned> perm_;
  std::vector<unsigned> order_;
  std::vector<unsigned> reads_;
  std::vector<std::vector<unsigned>> sources_;
  std::vector<unsigned> pick_;
  bool started_ = false;
  bool done_ = false;
};

void for_each_candidate(const std::shared_ptr<const PreTrace>& pt,
                        const std::function<void(const Execution&)>& visit,
                        EnumOptions opts = {});

std::vector<Execution> enumerate_candidates(
    const std::shared_ptr<const PreTrace>& pt, EnumOptions opts = {});

/// Strict total order relation listing `order` front to back.
Rel order_relation(unsigned size, const std::vector<unsigned>& order);

/// Writes of `e` in mo order. Throws ValidationError if mo is not a strict
/// total order over the writes.
std::vector<unsigned> mo_order(const Execution& e);

/// Extends a partial memory order to a strict total order over the writes
/// that keeps mo;po irreflexive. Ties are broken by initialization writes
/// first, then label order. Throws PreconditionError when partial_mo is
/// not an order over writes or conflicts with po.
Rel complete_mo(const PreTrace& pt, const Rel& partial_mo);

struct Behavior {
  std::set<std::pair<std::string, std::string>> rf;  // (write, read) labels
  std::map<std::string, std::string> final_writes;   // location -> label

  auto operator<=>(const Behavior&) const = default;
};

Behavior observable_behavior(const Execution& e);

/// rf and the entire mo agree on the labels both executions share.
bool behavior_equiv(const Execution& a, const Execution& b);

/// Candidates of `pt` consistent under `m`, in enumeration order.
std::vector<Execution> consistent_set(const std::shared_ptr<const PreTrace>& pt,
                                      ModelId m, EnumOptions opts = {});

/// Value a read observes: its rf source's written value.
std::int64_t read_value(const Execution& e, unsigned r);

nlohmann::ordered_json store_execution(const Execution& e);
Execution load_execution(const nlohmann::json& doc);
nlohmann::ordered_json store_behavior(const Behavior& b);

}  // namespace portcheck

#endif  // PORTCHECK_EXECUTION_HPP_
