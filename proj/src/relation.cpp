// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#include "portcheck/relation.hpp"

#include <bit>
#include <map>
#include <sstream>

#include "portcheck/errors.hpp"

namespace portcheck {

namespace {

EventMask low_bits(unsigned n) {
  return n >= 32 ? ~EventMask{0} : (bit(n) - 1);
}

void check_chain(std::span<const Rel* const> chain) {
  if (chain.empty()) throw PreconditionError("empty relation chain");
  for (const Rel* r : chain) {
    if (r->size() != chain.front()->size()) {
      throw UniverseMismatch("relation chain mixes universe sizes");
    }
  }
}

}  // namespace

Rel::Rel(unsigned size) : size_(size) {
  if (size > kMaxEvents) {
    throw CapExceeded("relation universe of " + std::to_string(size) +
                      " events exceeds the maximum of " +
                      std::to_string(kMaxEvents));
  }
}

Rel::Rel(unsigned size,
         std::initializer_list<std::pair<unsigned, unsigned>> pairs)
    : Rel(size) {
  for (auto [a, b] : pairs) insert(a, b);
}

Rel Rel::identity_on(unsigned size, EventMask set) {
  Rel r(size);
  set &= r.universe();
  for (EventMask s = set; s != 0; s &= s - 1) {
    const unsigned i = std::countr_zero(s);
    r.rows_.row[i] = bit(i);
  }
  return r;
}

Rel Rel::product(unsigned size, EventMask from, EventMask to) {
  Rel r(size);
  from &= r.universe();
  to &= r.universe();
  for (EventMask s = from; s != 0; s &= s - 1) {
    r.rows_.row[std::countr_zero(s)] = to;
  }
  return r;
}

EventMask Rel::universe() const { return low_bits(size_); }

void Rel::insert(unsigned a, unsigned b) {
  if (a >= size_ || b >= size_) {
    throw UniverseMismatch("pair outside the relation universe");
  }
  rows_.row[a] |= bit(b);
}

void Rel::erase(unsigned a, unsigned b) {
  if (a < size_ && b < size_) rows_.row[a] &= ~bit(b);
}

void Rel::set_row(unsigned a, EventMask bits) {
  if (a >= size_) throw UniverseMismatch("row outside the relation universe");
  rows_.row[a] = bits & universe();
}

EventMask Rel::column(unsigned b) const {
  EventMask col = 0;
  for (unsigned i = 0; i < size_; ++i) {
    if (contains(i, b)) col |= bit(i);
  }
  return col;
}

EventMask Rel::image(EventMask from) const {
  EventMask out = 0;
  for (EventMask s = from & universe(); s != 0; s &= s - 1) {
    out |= rows_.row[std::countr_zero(s)];
  }
  return out;
}

EventMask Rel::domain() const {
  EventMask d = 0;
  for (unsigned i = 0; i < size_; ++i) {
    if (rows_.row[i] != 0) d |= bit(i);
  }
  return d;
}

EventMask Rel::range() const {
  EventMask r = 0;
  for (unsigned i = 0; i < size_; ++i) r |= rows_.row[i];
  return r;
}

bool Rel::empty() const { return domain() == 0; }

std::size_t Rel::pair_count() const {
  std::size_t n = 0;
  for (unsigned i = 0; i < size_; ++i) n += std::popcount(rows_.row[i]);
  return n;
}

std::vector<std::pair<unsigned, unsigned>> Rel::pairs() const {
  std::vector<std::pair<unsigned, unsigned>> out;
  for (unsigned i = 0; i < size_; ++i) {
    for (EventMask s = rows_.row[i]; s != 0; s &= s - 1) {
      out.emplace_back(i, std::countr_zero(s));
    }
  }
  return out;
}

void Rel::check_same(const Rel& other) const {
  if (size_ != other.size_) {
    throw UniverseMismatch("relations over universes of size " +
                           std::to_string(size_) + " and " +
                           std::to_string(other.size_));
  }
}

Rel& Rel::operator|=(const Rel& other) {
  check_same(other);
  for (unsigned i = 0; i < size_; ++i) rows_.row[i] |= other.rows_.row[i];
  return *this;
}

Rel& Rel::operator&=(const Rel& other) {
  check_same(other);
  for (unsigned i = 0; i < size_; ++i) rows_.row[i] &= other.rows_.row[i];
  return *this;
}

Rel& Rel::operator-=(const Rel& other) {
  check_same(other);
  for (unsigned i = 0; i < size_; ++i) rows_.row[i] &= ~other.rows_.row[i];
  return *this;
}

Rel operator|(Rel a, const Rel& b) { return a |= b; }
Rel operator&(Rel a, const Rel& b) { return a &= b; }
Rel operator-(Rel a, const Rel& b) { return a -= b; }

Rel unite(const Rel& a, const Rel& b) { return a | b; }

Rel inverse(const Rel& r) {
  Rel out(r.size());
  kernels::BitRows rows;
  kernels::active_kernels().transpose(r.rows(), rows, r.size());
  for (unsigned i = 0; i < r.size(); ++i) out.set_row(i, rows.row[i]);
  return out;
}

Rel compose(const Rel& a, const Rel& b) {
  if (a.size() != b.size()) {
    throw UniverseMismatch("cannot compose relations over different universes");
  }
  kernels::BitRows rows;
  kernels::active_kernels().compose(a.rows(), b.rows(), rows, a.size());
  Rel out(a.size());
  for (unsigned i = 0; i < a.size(); ++i) out.set_row(i, rows.row[i]);
  return out;
}

Rel compose(std::span<const Rel* const> chain) {
  check_chain(chain);
  Rel acc = *chain.front();
  for (std::size_t i = 1; i < chain.size(); ++i) acc = compose(acc, *chain[i]);
  return acc;
}

Rel tclosure(const Rel& r) {
  kernels::BitRows rows = r.rows();
  kernels::active_kernels().closure(rows, r.size());
  Rel out(r.size());
  for (unsigned i = 0; i < r.size(); ++i) out.set_row(i, rows.row[i]);
  return out;
}

Rel reflexive(const Rel& r) {
  return r | Rel::identity_on(r.size(), r.universe());
}

Rel restrict(const Rel& r, EventMask set) { return restrict(r, set, set); }

Rel restrict(const Rel& r, EventMask from, EventMask to) {
  Rel out(r.size());
  for (unsigned i = 0; i < r.size(); ++i) {
    if (from & bit(i)) out.set_row(i, r.row(i) & to);
  }
  return out;
}

bool is_irreflexive(const Rel& r) {
  for (unsigned i = 0; i < r.size(); ++i) {
    if (r.contains(i, i)) return false;
  }
  return true;
}

bool is_transitive(const Rel& r) { return tclosure(r) == r; }

bool has_cycle(const Rel& r) { return !is_irreflexive(tclosure(r)); }

bool is_strict_total_on(const Rel& r, EventMask set) {
  if (r.domain() & ~set) return false;
  if (r.range() & ~set) return false;
  if (has_cycle(r)) return false;
  const Rel closed = tclosure(r);
  for (EventMask s = set; s != 0; s &= s - 1) {
    const unsigned i = std::countr_zero(s);
    const EventMask related = closed.row(i) | closed.column(i) | bit(i);
    if ((related & set) != set) return false;
  }
  return true;
}

std::optional<std::vector<unsigned>> find_cycle(const Rel& r) {
  const Rel closed = tclosure(r);
  for (unsigned start = 0; start < r.size(); ++start) {
    if (!closed.contains(start, start)) continue;
    // BFS from start's successors back to start.
    std::vector<int> parent(r.size(), -1);
    std::vector<unsigned> queue;
    EventMask seen = 0;
    for (EventMask s = r.row(start); s != 0; s &= s - 1) {
      const unsigned j = std::countr_zero(s);
      parent[j] = static_cast<int>(start);
      seen |= bit(j);
      queue.push_back(j);
    }
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const unsigned cur = queue[qi];
      if (cur == start) break;
      for (EventMask s = r.row(cur) & ~seen; s != 0; s &= s - 1) {
        const unsigned j = std::countr_zero(s);
        parent[j] = static_cast<int>(cur);
        seen |= bit(j);
        queue.push_back(j);
      }
    }
    std::vector<unsigned> path{start};
    unsigned cur = start;
    do {
      cur = static_cast<unsigned>(parent[cur]);
      path.push_back(cur);
    } while (cur != start);
    return std::vector<unsigned>(path.rbegin(), path.rend());
  }
  return std::nullopt;
}

EventMask composition_reflexive_points(std::span<const Rel* const> chain) {
  check_chain(chain);
  const unsigned n = chain.front()->size();
  Rel prefix = *chain.front();
  for (std::size_t i = 1; i + 1 < chain.size(); ++i) {
    prefix = compose(prefix, *chain[i]);
  }
  if (chain.size() == 1) {
    EventMask pts = 0;
    for (unsigned i = 0; i < n; ++i) {
      if (prefix.contains(i, i)) pts |= bit(i);
    }
    return pts;
  }
  // (a, a) in prefix;last  iff  prefix.row(a) meets column a of last.
  kernels::BitRows last_t;
  kernels::active_kernels().transpose(chain.back()->rows(), last_t, n);
  EventMask pts = 0;
  for (unsigned i = 0; i < n; ++i) {
    if (prefix.row(i) & last_t.row[i]) pts |= bit(i);
  }
  return pts;
}

bool composition_irreflexive(std::span<const Rel* const> chain) {
  return composition_reflexive_points(chain) == 0;
}

bool composition_irreflexive(std::initializer_list<const Rel*> chain) {
  return composition_irreflexive(
      std::span<const Rel* const>(chain.begin(), chain.size()));
}

std::optional<std::vector<unsigned>> composed_cycle_from(
    std::span<const Rel* const> chain, unsigned start) {
  check_chain(chain);
  const std::size_t k = chain.size();
  // frontier[i] = nodes reachable from start after i steps.
  std::vector<EventMask> frontier(k + 1, 0);
  frontier[0] = bit(start);
  for (std::size_t i = 0; i < k; ++i) {
    frontier[i + 1] = chain[i]->image(frontier[i]);
  }
  if (!(frontier[k] & bit(start))) return std::nullopt;
  std::vector<unsigned> path(k + 1);
  path[k] = start;
  for (std::size_t i = k; i > 0; --i) {
    const EventMask preds = chain[i - 1]->column(path[i]) & frontier[i - 1];
    path[i - 1] = static_cast<unsigned>(std::countr_zero(preds));
  }
  return path;
}

std::optional<std::vector<unsigned>> find_composed_cycle(
    std::span<const Rel* const> chain) {
  const EventMask pts = composition_reflexive_points(chain);
  if (pts == 0) return std::nullopt;
  return composed_cycle_from(chain, static_cast<unsigned>(std::countr_zero(pts)));
}

std::string to_dot(const Rel& r, std::span<const std::string> labels,
                   std::span<const unsigned> groups, const std::string& name) {
  std::ostringstream out;
  out << "digraph \"" << name << "\" {\n";
  std::map<unsigned, std::vector<unsigned>> by_group;
  for (unsigned i = 0; i < r.size(); ++i) {
    by_group[i < groups.size() ? groups[i] : 0].push_back(i);
  }
  for (const auto& [group, members] : by_group) {
    out << "  subgraph cluster_" << group << " {\n    label=\"T" << group
        << "\";\n";
    for (unsigned i : members) {
      out << "    \"" << labels[i] << "\";\n";
    }
    out << "  }\n";
  }
  for (auto [a, b] : r.pairs()) {
    out << "  \"" << labels[a] << "\" -> \"" << labels[b] << "\";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace portcheck
