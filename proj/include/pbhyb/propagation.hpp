/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#pragma once

#include <vector>

#include "pbhyb/model.hpp"

namespace pbhyb {

enum class EngineKind { Counting, Watched };

struct Propagation {
  Lit lit;
  ConstraintId reason;
};

/// Outcome of registering a constraint or processing one assignment.
struct PropResult {
  enum class Kind { NoOp, Propagations, Conflict };
  Kind kind = Kind::NoOp;
  std::vector<Propagation> propagations;
  ConstraintId conflict = kNoConstraint;

  bool isConflict() const { return kind == Kind::Conflict; }
};

struct PropCounters {
  uint64_t constraintVisits = 0;
  uint64_t watchReplacements = 0;  // watch additions and drops
  uint64_t slackUpdates = 0;       // counting-side cached slack changes
  uint64_t unitsEmitted = 0;
};

/// Both unit-propagation engines behind one interface. Each constraint is
/// attached to exactly one engine when registered and stays there.
///
/// Counting keeps a cached slack per constraint and updates it on every
/// (un)assignment of a variable in the constraint. Watched keeps a watch set
/// W(C) whose coefficients must sum to at least degree + a1; only
/// assignments falsifying a watched literal visit the constraint, and
/// unassignments are free.
///
/// Call discipline: registerConstraint and auditInvariants require the trail
/// to be at a propagation fixpoint (every entry has been through onAssign);
/// onAssign must be called once per trail entry in trail order, and
/// onUnassign once per popped entry, LIFO, only for entries that were
/// processed.
class PropEngine {
 public:
  explicit PropEngine(int numVars);

  struct Registered {
    ConstraintId id;
    PropResult result;
  };
  Registered registerConstraint(const PBConstraint& c, EngineKind kind, const Trail& trail);

  PropResult onAssign(Lit l, const Trail& trail);
  void onUnassign(Lit l);

  int numConstraints() const { return static_cast<int>(constraints_.size()); }
  const PBConstraint& constraint(ConstraintId id) const { return constraints_[id]; }
  EngineKind engineOf(ConstraintId id) const { return kinds_[id]; }

  void markDeleted(ConstraintId id) { deleted_[id] = true; }
  bool isDeleted(ConstraintId id) const { return deleted_[id]; }

  const PropCounters& counters() const { return counters_; }
  uint64_t visitsOf(ConstraintId id) const { return visits_[id]; }

  /// Counting-side cached slack, exposed for audits and tests.
  Wide cachedSlack(ConstraintId id) const { return cachedSlack_[id]; }

  /// Term indices currently watched (watched-engine constraints only).
  std::vector<int> watchedIndices(ConstraintId id) const {
    std::vector<int> out;
    for (size_t i = 0; i < watched_[id].size(); ++i)
      if (watched_[id][i]) out.push_back(static_cast<int>(i));
    return out;
  }

  /// Verifies the per-engine invariants against the trail: the cached slack
  /// identity for counting constraints, and for watched constraints either
  /// Eq-1 coverage by non-falsified watches or the exhausted-watches state.
  /// Throws std::logic_error on any violation. Requires a fixpoint trail.
  void auditInvariants(const Trail& trail) const;

 private:
  struct WatchRef {
    ConstraintId id;
    int termIdx;
  };

  void emitUnits(const PBConstraint& c, Wide slackValue, const Trail& trail,
                 PropResult* result);
  bool watchedVisit(const WatchRef& ref, Lit assigned, const Trail& trail,
                    PropResult* result);

  int numVars_;
  std::vector<PBConstraint> constraints_;
  std::vector<EngineKind> kinds_;
  std::vector<char> deleted_;

  // counting state
  std::vector<Wide> cachedSlack_;               // by constraint id (counting only)
  std::vector<std::vector<WatchRef>> occ_;      // by assigned-literal index

  // watched state
  std::vector<std::vector<char>> watched_;      // by id: per-term watch flags
  std::vector<Wide> watchSum_;                  // by id: sum of watched coefs
  std::vector<Wide> minWatchSum_;               // by id: degree + a1
  std::vector<std::vector<WatchRef>> watchList_;  // by assigned-literal index

  PropCounters counters_;
  std::vector<uint64_t> visits_;
};

}  // namespace pbhyb
