/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

// Test-only reference implementations. Everything here evaluates constraints
// directly from their term lists so the production slack/propagation paths
// can be checked against them.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pbhyb/model.hpp"

namespace oracle {

using namespace pbhyb;

// assignment encoded as a bitmask: bit v-1 is the value of variable v
inline bool litTrue(Lit l, uint64_t mask) {
  bool v = (mask >> (l.var() - 1)) & 1;
  return l.negated() ? !v : v;
}

inline bool satisfiesRaw(const RawConstraint& raw, uint64_t mask) {
  Wide lhs = 0;
  for (const RawTerm& t : raw.terms)
    if (litTrue(t.lit, mask)) lhs += t.coef;
  switch (raw.rel) {
    case Relation::GreaterEq: return lhs >= raw.rhs;
    case Relation::LessEq: return lhs <= raw.rhs;
    case Relation::Equal: return lhs == raw.rhs;
  }
  return false;
}

inline bool satisfiesConstraint(const PBConstraint& c, uint64_t mask) {
  Wide lhs = 0;
  for (const Term& t : c.terms())
    if (litTrue(t.lit, mask)) lhs += t.coef;
  return lhs >= c.degree();
}

inline bool satisfiesInstance(const Instance& inst, uint64_t mask) {
  if (inst.triviallyFalse()) return false;
  for (const PBConstraint& c : inst.constraints())
    if (!satisfiesConstraint(c, mask)) return false;
  return true;
}

inline Coef objectiveOf(const Instance& inst, uint64_t mask) {
  Wide v = 0;
  for (const ObjectiveTerm& t : *inst.objective())
    if (litTrue(t.lit, mask)) v += t.coef;
  return static_cast<Coef>(v);
}

struct EnumResult {
  bool sat = false;
  std::optional<Coef> best;  // minimal objective value among models
};

// Exhaustive enumeration over all 2^n assignments (n <= 24).
inline EnumResult enumerate(const Instance& inst) {
  EnumResult r;
  int n = inst.numVars();
  for (uint64_t mask = 0; mask < (uint64_t(1) << n); ++mask) {
    if (!satisfiesInstance(inst, mask)) continue;
    r.sat = true;
    if (inst.objective()) {
      Coef v = objectiveOf(inst, mask);
      if (!r.best || v < *r.best) r.best = v;
    }
  }
  return r;
}

// 0/1 knapsack: maximal total value within the capacity.
inline Coef knapsackBest(const std::vector<Coef>& weights, const std::vector<Coef>& values,
                         Coef capacity) {
  std::vector<Coef> table(static_cast<size_t>(capacity) + 1, 0);
  for (size_t i = 0; i < weights.size(); ++i) {
    for (Coef w = capacity; w >= weights[i]; --w) {
      Coef candidate = table[w - weights[i]] + values[i];
      if (candidate > table[w]) table[w] = candidate;
    }
  }
  return table[static_cast<size_t>(capacity)];
}

// Definitional propagation: repeat "assign every unit literal of every
// constraint" until a fixpoint or a conflicting constraint appears. This is
// the oracle both engines must match.
struct FixpointOutcome {
  bool conflict = false;
};

inline FixpointOutcome definitionalFixpoint(const std::vector<PBConstraint>& constraints,
                                            Trail& trail) {
  while (true) {
    bool changed = false;
    for (const PBConstraint& c : constraints) {
      if (slack(c, trail) < 0) return FixpointOutcome{true};
      for (Lit u : unitLiterals(c, trail)) {
        if (trail.isFree(u)) {
          trail.assign(u, c.id());
          changed = true;
        }
      }
    }
    if (!changed) return FixpointOutcome{false};
  }
}

}  // namespace oracle
