// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PORTCHECK_RELATION_HPP_
#define PORTCHECK_RELATION_HPP_

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "portcheck/kernels.hpp"

namespace portcheck {

/// Set of event indices, bit i standing for event i.
using EventMask = std::uint32_t;

inline constexpr unsigned kMaxEvents = kernels::kMaxDim;

inline constexpr EventMask bit(unsigned i) { return EventMask{1} << i; }

/// Finite binary relation over the universe {0, ..., size-1}.
///
/// Indices are event positions inside one pre-trace; a relation never
/// spans two pre-traces. Combining relations of different sizes throws
/// UniverseMismatch.
class Rel {
 public:
  Rel() = default;
  explicit Rel(unsigned size);
  Rel(unsigned size, std::initializer_list<std::pair<unsigned, unsigned>> pairs);

  static Rel identity_on(unsigned size, EventMask set);
  static Rel product(unsigned size, EventMask from, EventMask to);

  unsigned size() const { return size_; }
  EventMask universe() const;

  bool contains(unsigned a, unsigned b) const {
    return (rows_.row[a] >> b) & 1u;
  }
  void insert(unsigned a, unsigned b);
  void erase(unsigned a, unsigned b);

  EventMask row(unsigned a) const { return rows_.row[a]; }
  void set_row(unsigned a, EventMask bits);
  /// {a | (a, b) in R}.
  EventMask column(unsigned b) const;
  /// Image of a set under R.
  EventMask image(EventMask from) const;

  EventMask domain() const;
  EventMask range() const;
  bool empty() const;
  std::size_t pair_count() const;
  std::vector<std::pair<unsigned, unsigned>> pairs() const;

  const kernels::BitRows& rows() const { return rows_; }

  bool operator==(const Rel&) const = default;

  Rel& operator|=(const Rel& other);
  Rel& operator&=(const Rel& other);
  Rel& operator-=(const Rel& other);

 private:
  void check_same(const Rel& other) const;

  unsigned size_ = 0;
  kernels::BitRows rows_;
};

Rel operator|(Rel a, const Rel& b);
Rel operator&(Rel a, const Rel& b);
Rel operator-(Rel a, const Rel& b);

Rel unite(const Rel& a, const Rel& b);
Rel inverse(const Rel& r);
Rel compose(const Rel& a, const Rel& b);
Rel compose(std::span<const Rel* const> chain);
Rel tclosure(const Rel& r);
/// R? = R union identity over the universe.
Rel reflexive(const Rel& r);
/// R restricted to pairs whose both endpoints lie in `set`.
Rel restrict(const Rel& r, EventMask set);
/// [from];R;[to].
Rel restrict(const Rel& r, EventMask from, EventMask to);

bool is_irreflexive(const Rel& r);
bool is_transitive(const Rel& r);
/// tclosure(R) intersects the identity.
bool has_cycle(const Rel& r);
/// Strict total order over exactly the elements of `set`.
bool is_strict_total_on(const Rel& r, EventMask set);

/// Witness path [a, ..., a] of a cycle in R, or nullopt when R is acyclic.
std::optional<std::vector<unsigned>> find_cycle(const Rel& r);

/// True iff the composition R1;...;Rk has no reflexive pair.
bool composition_irreflexive(std::span<const Rel* const> chain);
bool composition_irreflexive(std::initializer_list<const Rel*> chain);

/// Points a with (a, a) in R1;...;Rk.
EventMask composition_reflexive_points(std::span<const Rel* const> chain);

/// Path [a, x1, ..., a] through R1;...;Rk starting and ending at `start`.
/// Returns nullopt if `start` is not a reflexive point of the composition.
std::optional<std::vector<unsigned>> composed_cycle_from(
    std::span<const Rel* const> chain, unsigned start);

/// Witness for the first reflexive point of R1;...;Rk, if any.
std::optional<std::vector<unsigned>> find_composed_cycle(
    std::span<const Rel* const> chain);

/// DOT rendering: nodes grouped into one subgraph per group id.
std::string to_dot(const Rel& r, std::span<const std::string> labels,
                   std::span<const unsigned> groups,
                   const std::string& name = "rel");

}  // namespace portcheck

#endif  // PORTCHECK_RELATION_HPP_
