/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "pbhyb/bench.hpp"
#include "pbhyb/propagation.hpp"
#include "support/equivalence.hpp"

using namespace pbhyb;

namespace {

PBConstraint cons(std::vector<Coef> coefs, Coef degree) {
  std::vector<Term> terms;
  for (size_t i = 0; i < coefs.size(); ++i)
    terms.push_back(Term{coefs[i], Lit::positive(static_cast<Var>(i + 1))});
  return PBConstraint(std::move(terms), degree);
}

std::vector<Lit> propagatedLits(const PropResult& r) {
  std::vector<Lit> out;
  for (const Propagation& p : r.propagations) out.push_back(p.lit);
  return out;
}

}  // namespace

TEST_CASE("watched registration picks a greedy prefix") {
  SUBCASE("3x1+2x2+x3 >= 3 needs every literal") {
    Trail t(3);
    PropEngine e(3);
    auto reg = e.registerConstraint(cons({3, 2, 1}, 3), EngineKind::Watched, t);
    CHECK(reg.result.kind == PropResult::Kind::NoOp);
    CHECK(e.watchedIndices(reg.id) == std::vector<int>{0, 1, 2});
  }
  SUBCASE("a clause watches two literals") {
    Trail t(3);
    PropEngine e(3);
    auto reg = e.registerConstraint(cons({1, 1, 1}, 1), EngineKind::Watched, t);
    CHECK(reg.result.kind == PropResult::Kind::NoOp);
    CHECK(e.watchedIndices(reg.id).size() == 2);
  }
  SUBCASE("conflicting at registration under either engine") {
    for (EngineKind kind : {EngineKind::Counting, EngineKind::Watched}) {
      Trail t(2);
      t.assign(Lit::negative(1), std::nullopt);
      PropEngine e(2);
      // 2x1 + x2 >= 2 with x1 false: slack -1
      auto reg = e.registerConstraint(cons({2, 1}, 2), kind, t);
      CHECK(reg.result.isConflict());
      CHECK(reg.result.conflict == reg.id);
    }
  }
}

TEST_CASE("registration emits units implied under a non-empty trail") {
  for (EngineKind kind : {EngineKind::Counting, EngineKind::Watched}) {
    Trail t(3);
    t.assign(Lit::negative(1), std::nullopt);
    PropEngine e(3);
    auto reg = e.registerConstraint(cons({3, 2, 1}, 3), kind, t);
    CHECK(propagatedLits(reg.result) ==
          std::vector<Lit>{Lit::positive(2), Lit::positive(3)});
  }
}

TEST_CASE("counting assignment updates slack and emits the oracle units") {
  Trail t(3);
  PropEngine e(3);
  auto reg = e.registerConstraint(cons({3, 2, 1}, 3), EngineKind::Counting, t);
  CHECK(e.cachedSlack(reg.id) == 3);
  t.assign(Lit::negative(1), std::nullopt);
  PropResult r = e.onAssign(Lit::negative(1), t);
  CHECK(e.cachedSlack(reg.id) == 0);
  CHECK(propagatedLits(r) == std::vector<Lit>{Lit::positive(2), Lit::positive(3)});

  SUBCASE("unassignment restores the exact slack") {
    e.onUnassign(t.pop());
    CHECK(e.cachedSlack(reg.id) == 3);
  }
}

TEST_CASE("popping back to level 0 restores slack(C, empty) exactly") {
  Trail t(4);
  PropEngine e(4);
  PBConstraint c = cons({4, 3, 2, 1}, 5);
  auto reg = e.registerConstraint(c, EngineKind::Counting, t);
  Wide initial = e.cachedSlack(reg.id);
  CHECK(initial == 4 + 3 + 2 + 1 - 5);
  t.newLevel();
  for (Lit l : {Lit::negative(2), Lit::positive(3), Lit::negative(4)}) {
    t.assign(l, std::nullopt);
    e.onAssign(l, t);
  }
  CHECK(e.cachedSlack(reg.id) != initial);
  while (t.size() > 0) e.onUnassign(t.pop());
  CHECK(e.cachedSlack(reg.id) == initial);
}

TEST_CASE("watched assignment replaces the falsified watch when it can") {
  Trail t(3);
  PropEngine e(3);
  auto reg = e.registerConstraint(cons({1, 1, 1}, 1), EngineKind::Watched, t);
  REQUIRE(e.watchedIndices(reg.id) == std::vector<int>{0, 1});
  t.assign(Lit::negative(1), std::nullopt);
  PropResult r = e.onAssign(Lit::negative(1), t);
  CHECK(r.kind == PropResult::Kind::NoOp);
  CHECK(e.watchedIndices(reg.id) == std::vector<int>{1, 2});  // x1 swapped for x3
  // watched does nothing on unassignment
  e.onUnassign(t.pop());
  CHECK(e.watchedIndices(reg.id) == std::vector<int>{1, 2});
}

TEST_CASE("locality: untouched constraints are never visited") {
  Trail t(4);
  PropEngine e(4);
  auto touched = e.registerConstraint(cons({2, 1}, 2), EngineKind::Counting, t);
  // constraint over x3, x4 only
  std::vector<Term> other{{2, Lit::positive(3)}, {1, Lit::positive(4)}};
  auto untouched = e.registerConstraint(PBConstraint(other, 2), EngineKind::Watched, t);
  // x2 is falsified: only the first constraint may be visited
  t.assign(Lit::negative(2), std::nullopt);
  e.onAssign(Lit::negative(2), t);
  CHECK(e.visitsOf(touched.id) == 1);
  CHECK(e.visitsOf(untouched.id) == 0);
  // assigning a variable with neither polarity watched does not visit the
  // watched constraint: x4 is unwatched (watches cover 2+... degree+a1=4 via
  // x3+x4? both watched) -- use a wider constraint to get an unwatched tail
  std::vector<Term> wide{{5, Lit::positive(1)}, {5, Lit::positive(2)},
                         {1, Lit::positive(3)}, {1, Lit::positive(4)}};
  PropEngine e2(4);
  Trail t2(4);
  auto reg2 = e2.registerConstraint(PBConstraint(wide, 5), EngineKind::Watched, t2);
  REQUIRE(e2.watchedIndices(reg2.id) == std::vector<int>{0, 1});  // 5+5 covers 5+5
  t2.assign(Lit::negative(3), std::nullopt);
  e2.onAssign(Lit::negative(3), t2);
  CHECK(e2.visitsOf(reg2.id) == 0);
  t2.assign(Lit::positive(4), std::nullopt);
  e2.onAssign(Lit::positive(4), t2);
  CHECK(e2.visitsOf(reg2.id) == 0);
}

TEST_CASE("counting state restore is bit-identical") {
  std::mt19937_64 rng(2026);
  for (int it = 0; it < 200; ++it) {
    RandomPbParams params;
    params.maxVars = 8;
    params.maxConstraints = 6;
    params.coefMax = it % 2 == 0 ? 5 : 1000000;
    params.seed = 5000 + static_cast<uint64_t>(it);
    Instance inst = genRandomPb(params);
    if (inst.triviallyFalse() || inst.constraints().empty()) continue;

    Trail t(inst.numVars());
    PropEngine e(inst.numVars());
    bool conflict = false;
    for (const PBConstraint& c : inst.constraints()) {
      auto reg = e.registerConstraint(c, EngineKind::Counting, t);
      if (reg.result.isConflict()) {
        conflict = true;
        break;
      }
    }
    if (conflict) continue;

    std::vector<Wide> snapshot;
    for (ConstraintId id = 0; id < e.numConstraints(); ++id)
      snapshot.push_back(e.cachedSlack(id));

    Var v = 1 + static_cast<Var>(rng() % inst.numVars());
    Lit l = Lit::make(v, rng() & 1);
    t.assign(l, std::nullopt);
    e.onAssign(l, t);
    e.onUnassign(t.pop());

    for (ConstraintId id = 0; id < e.numConstraints(); ++id)
      REQUIRE(e.cachedSlack(id) == snapshot[id]);
  }
}

TEST_CASE("central property: engines match the definitional oracle") {
  int instances = 0;
  uint64_t levels = 0;
  for (uint64_t seed = 1; seed <= 150; ++seed) {
    RandomPbParams params;
    params.maxVars = 12;
    params.maxConstraints = 10;
    params.coefMax = seed % 2 == 0 ? 5 : 1000000;
    params.seed = seed;
    Instance inst = genRandomPb(params);
    equivalence::EquivReport report =
        equivalence::checkEngineEquivalence(inst, seed * 31 + 7, /*audit=*/true);
    CAPTURE(seed);
    CAPTURE(report.diag);
    REQUIRE(report.ok);
    ++instances;
    levels += report.levelsChecked;
  }
  // knapsack constraints give long conflict-free walks with active watches
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    KnapsackParams kp;
    kp.items = 8 + static_cast<int>(seed % 5);
    kp.weightMax = seed % 2 == 0 ? 9 : 100000;
    kp.seed = seed;
    Instance inst = genKnapsack(kp);
    equivalence::EquivReport report =
        equivalence::checkEngineEquivalence(inst, seed * 13 + 1, /*audit=*/true);
    CAPTURE(seed);
    CAPTURE(report.diag);
    REQUIRE(report.ok);
    ++instances;
    levels += report.levelsChecked;
  }
  CHECK(instances == 200);
  CHECK(levels > 300);  // the walks actually exercised decision levels
}

TEST_CASE("watched invariants survive registration mid-search and backtracking") {
  // register under a deep trail, force the falsified-watch top-up, then pop
  // everything and keep propagating: the audit must stay green throughout
  std::mt19937_64 rng(77);
  for (int it = 0; it < 300; ++it) {
    int numVars = 6;
    Trail t(numVars);
    PropEngine e(numVars);

    // a background trail of three decisions
    std::vector<Var> order{1, 2, 3, 4, 5, 6};
    for (int i = 0; i < 6; ++i)
      std::swap(order[i], order[i + rng() % (6 - i)]);
    int qhead = 0;
    auto drainOk = [&]() {
      while (qhead < t.size()) {
        Lit l = t.litAt(qhead++);
        PropResult r = e.onAssign(l, t);
        if (r.isConflict()) return false;
        for (const Propagation& p : r.propagations)
          if (t.isFree(p.lit)) t.assign(p.lit, p.reason);
      }
      e.auditInvariants(t);
      return true;
    };

    for (int d = 0; d < 3; ++d) {
      t.newLevel();
      t.assign(Lit::make(order[d], rng() & 1), std::nullopt);
      if (!drainOk()) break;
    }
    if (t.currentLevel() != 3) continue;

    // register a random watched constraint against this trail
    std::vector<Term> terms;
    Coef degree = 1 + static_cast<Coef>(rng() % 12);
    for (Var v = 1; v <= numVars; ++v) {
      if (rng() % 3 == 0) continue;
      terms.push_back(Term{1 + static_cast<Coef>(rng() % 9), Lit::make(v, rng() & 1)});
    }
    if (terms.empty()) continue;
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
      return a.coef != b.coef ? a.coef > b.coef
                              : a.lit.var() < b.lit.var();
    });
    for (Term& term : terms) term.coef = std::min(term.coef, degree);
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
      return a.coef != b.coef ? a.coef > b.coef
                              : a.lit.var() < b.lit.var();
    });
    auto reg = e.registerConstraint(PBConstraint(terms, degree), EngineKind::Watched, t);
    if (reg.result.isConflict()) continue;
    for (const Propagation& p : reg.result.propagations)
      if (t.isFree(p.lit)) t.assign(p.lit, p.reason);
    if (!drainOk()) continue;

    // unwind the whole trail; watched needs no onUnassign work
    while (t.currentLevel() > 0) {
      int pos = t.size() - 1;
      bool processed = pos < qhead;
      Lit l = t.pop();
      if (processed) e.onUnassign(l);
      qhead = std::min(qhead, t.size());
    }
    e.auditInvariants(t);

    // a fresh walk over the same engine state must keep the audits green
    for (int d = 0; d < 4 && t.size() < numVars; ++d) {
      Var fv = 0;
      for (Var v = 1; v <= numVars; ++v)
        if (!t.isAssigned(v)) { fv = v; break; }
      if (!fv) break;
      t.newLevel();
      t.assign(Lit::make(fv, rng() & 1), std::nullopt);
      if (!drainOk()) break;
    }
  }
}
