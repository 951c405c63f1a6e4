/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#include "pbhyb/propagation.hpp"

#include <algorithm>

namespace pbhyb {

PropEngine::PropEngine(int numVars) : numVars_(numVars) {
  occ_.resize(2 * (numVars + 1));
  watchList_.resize(2 * (numVars + 1));
}

void PropEngine::emitUnits(const PBConstraint& c, Wide slackValue, const Trail& trail,
                           PropResult* result) {
  assert(slackValue >= 0);
  for (const Term& t : c.terms()) {
    if (t.coef <= slackValue) break;  // descending coefficients
    if (trail.isFree(t.lit)) {
      result->kind = PropResult::Kind::Propagations;
      result->propagations.push_back(Propagation{t.lit, c.id()});
      ++counters_.unitsEmitted;
    }
  }
}

PropEngine::Registered PropEngine::registerConstraint(const PBConstraint& c, EngineKind kind,
                                                      const Trail& trail) {
  ConstraintId id = static_cast<ConstraintId>(constraints_.size());
  constraints_.push_back(c.withId(id));
  kinds_.push_back(kind);
  deleted_.push_back(false);
  visits_.push_back(0);
  cachedSlack_.push_back(0);
  watched_.emplace_back();
  watchSum_.push_back(0);
  minWatchSum_.push_back(0);

  const PBConstraint& stored = constraints_.back();
  PropResult result;

  if (kind == EngineKind::Counting) {
    for (int i = 0; i < stored.size(); ++i)
      occ_[(~stored.lit(i)).index()].push_back(WatchRef{id, i});
    Wide s = slack(stored, trail);
    cachedSlack_[id] = s;
    if (s < 0) {
      result.kind = PropResult::Kind::Conflict;
      result.conflict = id;
      return Registered{id, result};
    }
    if (s < stored.largestCoef()) emitUnits(stored, s, trail, &result);
    return Registered{id, result};
  }

  // Watched: greedily watch the highest-coefficient non-falsified literals
  // until their sum covers degree + a1.
  watched_[id].assign(stored.size(), 0);
  minWatchSum_[id] = static_cast<Wide>(stored.degree()) + stored.largestCoef();
  Wide& sum = watchSum_[id];
  for (int i = 0; i < stored.size() && sum < minWatchSum_[id]; ++i) {
    if (trail.isFalse(stored.lit(i))) continue;
    watched_[id][i] = 1;
    sum += stored.coef(i);
    watchList_[(~stored.lit(i)).index()].push_back(WatchRef{id, i});
    ++counters_.watchReplacements;
  }
  if (sum >= minWatchSum_[id]) return Registered{id, result};  // Eq-1 holds, no units

  // Not coverable by non-falsified literals alone: the constraint is
  // propagating or conflicting right now. Top up the watch set with the most
  // recently falsified literals so that, as backtracking unfalsifies them in
  // LIFO order, the watch sum reaches Eq-1 before any unwatched literal
  // becomes free again.
  std::vector<int> falsified;
  for (int i = 0; i < stored.size(); ++i)
    if (trail.isFalse(stored.lit(i))) falsified.push_back(i);
  std::sort(falsified.begin(), falsified.end(), [&](int a, int b) {
    return trail.position(stored.lit(a).var()) > trail.position(stored.lit(b).var());
  });
  for (int i : falsified) {
    if (sum >= minWatchSum_[id]) break;
    watched_[id][i] = 1;
    sum += stored.coef(i);
    watchList_[(~stored.lit(i)).index()].push_back(WatchRef{id, i});
    ++counters_.watchReplacements;
  }

  Wide s = slack(stored, trail);
  if (s < 0) {
    result.kind = PropResult::Kind::Conflict;
    result.conflict = id;
    return Registered{id, result};
  }
  emitUnits(stored, s, trail, &result);
  return Registered{id, result};
}

// Handles one watched-list entry for an assignment falsifying the watched
// term. Returns true when the watch was dropped (entry removal).
bool PropEngine::watchedVisit(const WatchRef& ref, Lit assigned, const Trail& trail,
                              PropResult* result) {
  const PBConstraint& c = constraints_[ref.id];
  std::vector<char>& flags = watched_[ref.id];
  Wide& sum = watchSum_[ref.id];
  const Wide minSum = minWatchSum_[ref.id];
  assert(c.lit(ref.termIdx) == ~assigned);
  (void)assigned;
  ++counters_.constraintVisits;
  ++visits_[ref.id];

  const Coef falsifiedCoef = c.coef(ref.termIdx);

  // Coverage must come from non-falsified watches only; other watched
  // literals may be falsified too (queued in this batch, or kept from a
  // registration under a partial assignment) and cannot back the watch we
  // are about to drop.
  Wide deadWeight = falsifiedCoef;
  for (int i = 0; i < c.size(); ++i)
    if (flags[i] && i != ref.termIdx && trail.isFalse(c.lit(i))) deadWeight += c.coef(i);

  // Extend the watch set with non-falsified literals, largest coefficients
  // first, until Eq-1 holds without the falsified watches.
  for (int i = 0; i < c.size() && sum - deadWeight < minSum; ++i) {
    if (flags[i] || trail.isFalse(c.lit(i))) continue;
    flags[i] = 1;
    sum += c.coef(i);
    watchList_[(~c.lit(i)).index()].push_back(WatchRef{ref.id, i});
    ++counters_.watchReplacements;
  }
  if (sum - deadWeight >= minSum) {
    flags[ref.termIdx] = 0;
    sum -= falsifiedCoef;
    ++counters_.watchReplacements;
    return true;  // watch dropped
  }

  // Watches cannot cover Eq-1: every non-falsified literal is now watched.
  // Fall back to the exact slack over all terms.
  Wide s = slack(c, trail);
  if (s < 0) {
    result->kind = PropResult::Kind::Conflict;
    result->conflict = ref.id;
    return false;
  }
  emitUnits(c, s, trail, result);
  return false;
}

PropResult PropEngine::onAssign(Lit l, const Trail& trail) {
  assert(trail.isTrue(l));
  PropResult result;

  // Counting: every constraint containing ~l loses coef(~l) of slack. The
  // whole list is processed even after a conflict so that cached slacks stay
  // exact and unassignment can undo them.
  std::vector<WatchRef>& occ = occ_[l.index()];
  for (size_t i = 0; i < occ.size();) {
    WatchRef ref = occ[i];
    if (deleted_[ref.id]) {
      occ[i] = occ.back();
      occ.pop_back();
      continue;
    }
    ++i;
    ++counters_.constraintVisits;
    ++visits_[ref.id];
    const PBConstraint& c = constraints_[ref.id];
    Wide& s = cachedSlack_[ref.id];
    s -= c.coef(ref.termIdx);
    ++counters_.slackUpdates;
    if (result.isConflict()) continue;  // keep updating, stop emitting
    if (s < 0) {
      result.kind = PropResult::Kind::Conflict;
      result.conflict = ref.id;
      result.propagations.clear();
      continue;
    }
    if (s < c.largestCoef()) emitUnits(c, s, trail, &result);
  }
  if (result.isConflict()) return result;

  // Watched: only constraints where ~l is a watched literal are visited.
  std::vector<WatchRef>& wl = watchList_[l.index()];
  for (size_t i = 0; i < wl.size();) {
    WatchRef ref = wl[i];
    if (deleted_[ref.id]) {
      wl[i] = wl.back();
      wl.pop_back();
      continue;
    }
    if (watchedVisit(ref, l, trail, &result)) {
      wl[i] = wl.back();
      wl.pop_back();
    } else {
      if (result.isConflict()) {
        result.propagations.clear();
        return result;
      }
      ++i;
    }
  }
  return result;
}

void PropEngine::onUnassign(Lit l) {
  // Counting restores slack; the watched scheme does nothing on unassignment.
  std::vector<WatchRef>& occ = occ_[l.index()];
  for (size_t i = 0; i < occ.size();) {
    WatchRef ref = occ[i];
    if (deleted_[ref.id]) {
      occ[i] = occ.back();
      occ.pop_back();
      continue;
    }
    ++i;
    cachedSlack_[ref.id] += constraints_[ref.id].coef(ref.termIdx);
    ++counters_.slackUpdates;
  }
}

void PropEngine::auditInvariants(const Trail& trail) const {
  for (ConstraintId id = 0; id < numConstraints(); ++id) {
    if (deleted_[id]) continue;
    const PBConstraint& c = constraints_[id];
    if (kinds_[id] == EngineKind::Counting) {
      Wide expect = slack(c, trail);
      if (cachedSlack_[id] != expect)
        throw std::logic_error("counting slack audit failed for constraint " +
                               std::to_string(id) + ": cached " + toString(cachedSlack_[id]) +
                               " != " + toString(expect));
      continue;
    }
    // watched bookkeeping: the stored sum matches the flags
    Wide sum = 0;
    Wide liveSum = 0;  // coverage by watches that are set to 1 or unassigned
    bool allNonFalsifiedWatched = true;
    for (int i = 0; i < c.size(); ++i) {
      if (watched_[id][i]) {
        sum += c.coef(i);
        if (!trail.isFalse(c.lit(i))) liveSum += c.coef(i);
      } else if (!trail.isFalse(c.lit(i))) {
        allNonFalsifiedWatched = false;
      }
    }
    if (sum != watchSum_[id])
      throw std::logic_error("watch sum bookkeeping failed for constraint " +
                             std::to_string(id));
    bool eq1 = liveSum >= minWatchSum_[id];
    if (!eq1 && !allNonFalsifiedWatched)
      throw std::logic_error(
          "watched invariant failed for constraint " + std::to_string(id) +
          ": watches neither satisfy the coverage inequality nor exhaust the "
          "non-falsified literals");
  }
}

}  // namespace pbhyb
