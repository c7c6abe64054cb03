// Copyright 2026 The portcheck Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PORTCHECK_MODELS_HPP_
#define PORTCHECK_MODELS_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "portcheck/execution.hpp"
#include "portcheck/model_id.hpp"

namespace portcheck {

/// Relations derived from po, rf and mo.
struct Derived {
  Rel po, rf, mo;
  Rel rfi, rfe;
  Rel hb;  // (po | rf)+
  Rel rb;  // rf^-1 ; mo_loc, without the pair an update forms with itself
  Rel mo_loc, mo_nonloc, mo_ext;
  Rel upd;  // [u]
  EventMask writes = 0;
  EventMask inits = 0;
};

/// Throws ValidationError if rf pairs events of different locations.
Derived derive(const PreTrace& pt, const Rel& rf, const Rel& mo);
Derived derive(const Execution& e);

/// A violated rule or matched catalogue entry with its cycle.
struct CycleHit {
  std::string id;
  std::vector<unsigned> path;  // event indices, first == last; may be empty
};

struct RuleVerdict {
  ModelId model = ModelId::SC;
  std::vector<CycleHit> violated;

  bool consistent() const { return violated.empty(); }
};

/// Evaluates every rule of `m`. A composed rule R1;...;Rk holds when the
/// composition is irreflexive.
RuleVerdict check_consistency(const Execution& e, ModelId m);

/// Same verdict as check_consistency(...).consistent(), without witnesses.
bool is_consistent(const Derived& d, ModelId m);
bool is_consistent(const Execution& e, ModelId m);

/// mo strict total, hb irreflexive and mo;hb irreflexive; shared by every
/// model and by the flip hypotheses.
bool is_coherent(const Derived& d);

/// Visits exactly the candidates of `pt` that are consistent under `m`, in
/// CandidateStream order. rf is assigned read by read and a branch is cut
/// as soon as a rule fails, which is sound because every rule is monotone
/// in rf.
void for_each_consistent(const std::shared_ptr<const PreTrace>& pt, ModelId m,
                         const std::function<void(const Execution&)>& visit,
                         EnumOptions opts = {});

/// First candidate in that order consistent under `m` and accepted by
/// `pred`; stops the traversal there.
std::optional<Execution> find_consistent(
    const std::shared_ptr<const PreTrace>& pt, ModelId m,
    const std::function<bool(const Execution&)>& pred, EnumOptions opts = {});

/// Same traversal for the candidates satisfying is_coherent.
void for_each_coherent(const std::shared_ptr<const PreTrace>& pt,
                       const std::function<void(const Execution&)>& visit,
                       EnumOptions opts = {});

/// Enumerates the SRA-consistent executions of `pt`, flagging which are also
/// SC- and TSO-consistent.
void for_each_classified(
    const std::shared_ptr<const PreTrace>& pt,
    const std::function<void(const Execution&, bool sc, bool tso)>& visit,
    EnumOptions opts = {});

/// Enumerates the coherent candidates of `pt` with each model's verdict,
/// computed independently per model.
void for_each_coherent_verdicts(
    const std::shared_ptr<const PreTrace>& pt,
    const std::function<void(const Execution&, bool sc, bool tso, bool sra)>& visit,
    EnumOptions opts = {});

/// Catalogue ids of `m`: "cat.a" ... "cat.k" (suffix ".tso" or ".sra").
std::vector<std::string> catalogue_ids(ModelId m);

/// Catalogue entries whose cycle occurs in `e`. Throws PreconditionError if
/// `e` is consistent under `m`.
std::vector<CycleHit> classify_min_cycles(const Execution& e, ModelId m);

/// Catalogue entries present in `d`, whether or not it is consistent.
std::vector<CycleHit> catalogue_hits(const Derived& d, ModelId m);

/// Whether catalogue_hits(d, m) is non-empty, without building witnesses.
bool catalogue_tagged(const Derived& d, ModelId m);

/// rb;mo_ext;po has a reflexive point.
bool has_rb_moext_po_cycle(const Derived& d);

/// po | rf | mo | fr is acyclic, with fr computed independently of derive().
bool sc_linearization_oracle(const Execution& e);

/// Final behaviors of a store-buffer machine running `pt`: per-thread FIFO
/// buffers, nondeterministic flushes, atomic updates on an empty buffer.
/// Cross-thread po is accepted only from events that precede the whole
/// target thread. Throws PreconditionError on other shapes or more than
/// `max_events` program events.
std::set<Behavior> tso_store_buffer_oracle(const PreTrace& pt,
                                           unsigned max_events = 10);

/// Behaviors of the TSO-consistent candidates of `pt`.
std::set<Behavior> tso_axiomatic_behaviors(
    const std::shared_ptr<const PreTrace>& pt, EnumOptions opts = {});

/// Inclusion-minimal read sets whose rf edges, once dropped, leave an
/// execution satisfying every rule of `m` (mo unchanged). Ascending size,
/// then index order.
std::vector<EventMask> crucial_sets(const Execution& e, ModelId m);

/// Some crucial set exists. Every rule is monotone in rf, so this amounts
/// to dropping every rf edge.
bool crucial_set_exists(const Execution& e, ModelId m);

/// Whether the hypotheses of the mo_ext flip hold for read `rx`, with
/// initialization writes hb-before every program event; on false,
/// `why` names the failing one.
bool flip_hypotheses_hold(const Execution& e, unsigned rx,
                          std::string* why = nullptr);
bool flip_hypotheses_hold(const Derived& d, unsigned rx,
                          std::string* why = nullptr);

/// [rx];rb;mo_ext?;hb? has a reflexive point at rx.
bool rwr_cycle(const Derived& d, unsigned rx);

/// Execution with the same pre-trace and rf, no [rx];rb;mo_ext?;hb? cycle,
/// the same writes mo-before rx's source, and the hypotheses preserved;
/// found by reordering mo while keeping every mo&hb pair, fewest flipped
/// pairs first. Returns `e` when there is no cycle to break and nullopt if
/// no such order exists. Throws PreconditionError if the hypotheses fail.
/// With `keep_source_prefix` false the writes mo-before rx's source may
/// change.
std::optional<Execution> flip_moext_witness(const Execution& e, unsigned rx,
                                            bool keep_source_prefix = true);

/// Whether flip_moext_witness would find a repair; stops at the first one.
bool moext_flip_exists(const Execution& e, unsigned rx, bool keep_source_prefix = true);

}  // namespace portcheck

#endif  // PORTCHECK_MODELS_HPP_
