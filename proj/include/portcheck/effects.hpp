// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PORTCHECK_EFFECTS_HPP_
#define PORTCHECK_EFFECTS_HPP_

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "portcheck/execution.hpp"
#include "portcheck/model_id.hpp"
#include "portcheck/pretrace.hpp"

namespace portcheck {

/// Syntactic difference between a source pre-trace P and a transformed P'.
///
/// Events are matched by label. The joint universe lists P's events in
/// order followed by the events only P' has; both po relations are closed.
struct Effect {
  std::vector<Event> events;
  std::vector<int> in_source;  // index in P, or -1
  std::vector<int> in_target;  // index in P', or -1
  EventMask st_minus = 0;      // labels(P) \ labels(P')
  EventMask st_plus = 0;       // labels(P') \ labels(P)
  Rel po_source, po_target;
  Rel po_minus, po_plus;

  unsigned size() const { return static_cast<unsigned>(events.size()); }
  EventMask shared() const;
  std::vector<std::string> labels(EventMask m) const;
  std::vector<std::pair<std::string, std::string>> label_pairs(const Rel& r) const;
};

/// Throws ValidationError when a shared label differs in kind, location or
/// written value, and CapExceeded when the joint universe is too large.
Effect diff_effect(const PreTrace& p, const PreTrace& p2);

struct TuwriWitness {
  std::string w_y, r_y, r_x, w_x;  // r_y empty for the second pattern
  int pattern = 1;

  auto operator<=>(const TuwriWitness&) const = default;
};

using LabelPair = std::pair<std::string, std::string>;

struct EffectClass {
  bool wi = false, we = false, tuwri = false;
  bool same_loc_wr_deord = false, same_loc_rw_deord = false;
  bool same_loc_rr_deord = false, ww_deord = false;
  std::vector<std::string> introduced_writes, eliminated_writes;
  std::vector<TuwriWitness> tuwri_witnesses;
  std::vector<LabelPair> wr_pairs, rw_pairs, rr_pairs, ww_pairs;
};

/// Flags of `eff` (which must be diff_effect(p, p2)). Initialization writes
/// never count as introduced or eliminated writes.
EffectClass classify_effect(const PreTrace& p, const PreTrace& p2,
                            const Effect& eff);
EffectClass classify_effect(const PreTrace& p, const PreTrace& p2);

/// Projection of an execution of one side of an effect onto the shared
/// labels: the rf source of every shared read and the mo order of the
/// shared writes. Two keys are equal exactly when behavior_equiv holds.
class BehaviorKey {
 public:
  BehaviorKey(const Effect& eff, bool target);
  std::string operator()(const Execution& e) const;

 private:
  EventMask shared_ = 0;
  std::vector<int> to_joint_;  // side index -> joint index
  std::vector<unsigned> reads_;
  std::vector<unsigned> writes_;
  EventMask write_mask_ = 0;
};

struct SafetyResult {
  bool safe = true;
  /// First execution of P' (enumeration order) with no match in P.
  std::optional<Execution> counterexample;
};

/// Every m-consistent execution of p2 has a behavior_equiv m-consistent
/// execution of p.
SafetyResult is_safe_effect(const std::shared_ptr<const PreTrace>& p,
                            const std::shared_ptr<const PreTrace>& p2,
                            ModelId m, EnumOptions opts = {});

struct TriangularRace {
  std::string w_x, r_x, w_y;

  auto operator<=>(const TriangularRace&) const = default;
};

/// Axiomatic triangular races of `e`, sorted. Initialization writes are
/// not racing writes.
std::vector<TriangularRace> detect_triangular_race(const Execution& e);

/// No write to x and no update lies po-between w_y and r_x. Throws
/// PreconditionError unless `e` is TSO-consistent and `w` is one of its
/// races.
bool check_atr_shape(const Execution& e, const TriangularRace& w);

struct IntroducedRace {
  Execution execution;  // TSO-consistent execution of P'
  TriangularRace race;
};

/// A TSO-consistent execution of p2 with a race that no behavior_equiv
/// TSO-consistent execution of p has on the same labels.
std::optional<IntroducedRace> introduces_tr(
    const std::shared_ptr<const PreTrace>& p,
    const std::shared_ptr<const PreTrace>& p2, EnumOptions opts = {});

nlohmann::ordered_json store_effect(const Effect& eff);
nlohmann::ordered_json store_effect_class(const EffectClass& c);
nlohmann::ordered_json store_race(const TriangularRace& r);

}  // namespace portcheck

#endif  // PORTCHECK_EFFECTS_HPP_
