/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "pbhyb/model.hpp"
#include "support/oracles.hpp"

using namespace pbhyb;

namespace {

RawConstraint raw(std::vector<RawTerm> terms, Coef rhs, Relation rel) {
  return RawConstraint{std::move(terms), rhs, rel};
}

Lit x(Var v) { return Lit::positive(v); }
Lit nx(Var v) { return Lit::negative(v); }

// Exhaustive solution-set comparison between a raw constraint and its
// normalized output, over all assignments of numVars variables.
bool normalizePreservesSolutions(const RawConstraint& rc, int numVars,
                                 const NormalizeOptions& opts = {}) {
  NormalizeResult norm = normalize(rc, opts);
  for (uint64_t mask = 0; mask < (uint64_t(1) << numVars); ++mask) {
    bool before = oracle::satisfiesRaw(rc, mask);
    bool after = !norm.triviallyFalse;
    for (const PBConstraint& c : norm.constraints)
      if (!oracle::satisfiesConstraint(c, mask)) after = false;
    if (before != after) return false;
  }
  return true;
}

RawConstraint randomRaw(std::mt19937_64& rng, int numVars, Coef coefMax) {
  RawConstraint rc;
  int len = 1 + static_cast<int>(rng() % (2 * numVars));  // duplicates allowed
  for (int i = 0; i < len; ++i) {
    Coef c = 1 + static_cast<Coef>(rng() % coefMax);
    if (rng() & 1) c = -c;
    Var v = 1 + static_cast<Var>(rng() % numVars);
    rc.terms.push_back(RawTerm{c, Lit::make(v, rng() & 1)});
  }
  Coef bound = 3 * coefMax;
  rc.rhs = static_cast<Coef>(rng() % (2 * bound + 1)) - bound;
  switch (rng() % 3) {
    case 0: rc.rel = Relation::GreaterEq; break;
    case 1: rc.rel = Relation::LessEq; break;
    default: rc.rel = Relation::Equal; break;
  }
  return rc;
}

Trail trailWithFalse(int numVars, std::vector<Lit> falsified) {
  Trail t(numVars);
  for (Lit l : falsified) t.assign(~l, std::nullopt);
  return t;
}

}  // namespace

TEST_CASE("literal complement and indexing") {
  Lit a = x(3);
  CHECK(~~a == a);
  CHECK(a.var() == 3);
  CHECK(!a.negated());
  CHECK((~a).negated());
  CHECK(Lit::fromDimacs(-5) == nx(5));
  CHECK(nx(5).toDimacs() == -5);
  CHECK(a.index() != (~a).index());
  CHECK(a.var() >= 1);
}

TEST_CASE("trail assigns, levels and LIFO pops") {
  Trail t(4);
  CHECK(t.currentLevel() == 0);
  t.assign(x(1), std::nullopt);
  t.newLevel();
  t.assign(nx(2), 7);
  t.assign(x(3), 7);
  CHECK(t.currentLevel() == 1);
  CHECK(t.isTrue(x(1)));
  CHECK(t.isFalse(x(2)));
  CHECK(t.isFree(x(4)));
  CHECK(t.levelOf(1) == 0);
  CHECK(t.levelOf(3) == 1);
  CHECK(t.reason(2) == std::optional<ConstraintId>(7));
  CHECK(t.reason(1) == std::nullopt);
  // levels are non-decreasing along the stack
  for (int i = 0; i + 1 < t.size(); ++i)
    CHECK(t.levelAt(i) <= t.levelAt(i + 1));
  CHECK(t.pop() == x(3));
  CHECK(t.pop() == nx(2));
  CHECK(t.currentLevel() == 0);
  CHECK(t.pop() == x(1));
  CHECK(t.size() == 0);
}

TEST_CASE("trail dissolves empty levels on pop") {
  Trail t(2);
  t.newLevel();
  t.assign(x(1), std::nullopt);
  t.newLevel();
  t.assign(x(2), std::nullopt);
  t.pop();
  CHECK(t.currentLevel() == 1);
  t.pop();
  CHECK(t.currentLevel() == 0);
}

TEST_CASE("normalize: negative coefficient moves to the complement") {
  // -3 x1 + 2 x2 >= -1  ->  3 ~x1 + 2 x2 >= 2, stored saturated as 2 ~x1 + 2 x2 >= 2
  RawConstraint rc = raw({{-3, x(1)}, {2, x(2)}}, -1, Relation::GreaterEq);
  NormalizeOptions noSat;
  noSat.saturate = false;
  NormalizeResult r = normalize(rc, noSat);
  REQUIRE(r.constraints.size() == 1);
  const PBConstraint& c = r.constraints[0];
  CHECK(c.degree() == 2);
  REQUIRE(c.size() == 2);
  CHECK(c.coef(0) == 3);
  CHECK(c.lit(0) == nx(1));
  CHECK(c.coef(1) == 2);
  CHECK(c.lit(1) == x(2));
  CHECK(normalizePreservesSolutions(rc, 2, noSat));

  NormalizeResult stored = normalize(rc);
  CHECK(stored.constraints[0].coef(0) == 2);
  CHECK(stored.constraints[0].degree() == 2);
  CHECK(normalizePreservesSolutions(rc, 2));
}

TEST_CASE("normalize: already-normal clause unchanged") {
  RawConstraint rc = raw({{1, x(1)}, {1, x(2)}}, 1, Relation::GreaterEq);
  NormalizeResult r = normalize(rc);
  REQUIRE(r.constraints.size() == 1);
  CHECK(r.constraints[0].degree() == 1);
  CHECK(r.constraints[0].coef(0) == 1);
  CHECK(r.constraints[0].coef(1) == 1);
}

TEST_CASE("normalize: saturation caps coefficients at the degree") {
  RawConstraint rc = raw({{5, x(1)}, {1, x(2)}}, 2, Relation::GreaterEq);
  NormalizeResult r = normalize(rc);
  REQUIRE(r.constraints.size() == 1);
  CHECK(r.constraints[0].coef(0) == 2);
  CHECK(r.constraints[0].coef(1) == 1);
  CHECK(r.constraints[0].degree() == 2);
  CHECK(normalizePreservesSolutions(rc, 2));

  NormalizeOptions noSat;
  noSat.saturate = false;
  NormalizeResult r2 = normalize(rc, noSat);
  CHECK(r2.constraints[0].coef(0) == 5);
  CHECK(normalizePreservesSolutions(rc, 2, noSat));
}

TEST_CASE("normalize: relations, tautologies and contradictions") {
  // x1 <= 0  ->  ~x1 >= 1
  NormalizeResult r = normalize(raw({{1, x(1)}}, 0, Relation::LessEq));
  REQUIRE(r.constraints.size() == 1);
  CHECK(r.constraints[0].lit(0) == nx(1));
  CHECK(r.constraints[0].degree() == 1);

  // equality splits in two
  NormalizeResult eq = normalize(raw({{2, x(1)}, {1, x(2)}}, 2, Relation::Equal));
  CHECK(eq.constraints.size() == 2);
  CHECK(normalizePreservesSolutions(raw({{2, x(1)}, {1, x(2)}}, 2, Relation::Equal), 2));

  // tautology dropped and signalled
  NormalizeResult taut = normalize(raw({{1, x(1)}}, 0, Relation::GreaterEq));
  CHECK(taut.constraints.empty());
  CHECK(taut.droppedTautologies == 1);
  CHECK(!taut.triviallyFalse);

  // contradictory constant constraint
  NormalizeResult contra = normalize(raw({{2, x(1)}, {-2, x(1)}}, 1, Relation::GreaterEq));
  CHECK(contra.constraints.empty());
  CHECK(contra.triviallyFalse);
}

TEST_CASE("normalize: duplicate variables merge by signed sum") {
  RawConstraint rc = raw({{2, x(1)}, {3, x(1)}, {1, x(2)}}, 4, Relation::GreaterEq);
  NormalizeResult r = normalize(rc);
  REQUIRE(r.constraints.size() == 1);
  CHECK(r.constraints[0].size() == 2);
  CHECK(r.constraints[0].coef(0) == 4);  // 5 saturated to the degree
  CHECK(normalizePreservesSolutions(rc, 2));

  // opposite polarities cancel against the degree
  RawConstraint mixed = raw({{3, x(1)}, {2, nx(1)}}, 4, Relation::GreaterEq);
  CHECK(normalizePreservesSolutions(mixed, 1));
}

TEST_CASE("normalize: input width limit is enforced") {
  NormalizeOptions opts;
  opts.maxCoefBits = 10;
  CHECK_THROWS_AS(normalize(raw({{5000, x(1)}}, 1, Relation::GreaterEq), opts), OverflowError);
  CHECK_NOTHROW(normalize(raw({{1000, x(1)}}, 1, Relation::GreaterEq), opts));
}

TEST_CASE("property: normalization preserves solution sets") {
  std::mt19937_64 rng(20260809);
  for (int it = 0; it < 3000; ++it) {
    int numVars = 1 + static_cast<int>(rng() % 10);
    Coef coefMax = (it % 2 == 0) ? 5 : 50;
    RawConstraint rc = randomRaw(rng, numVars, coefMax);
    CAPTURE(it);
    REQUIRE(normalizePreservesSolutions(rc, numVars));
    NormalizeOptions noSat;
    noSat.saturate = false;
    REQUIRE(normalizePreservesSolutions(rc, numVars, noSat));
  }
}

TEST_CASE("slack on the running example") {
  PBConstraint c({{3, x(1)}, {2, x(2)}, {1, x(3)}}, 3);
  CHECK(slack(c, Trail(3)) == 3);
  CHECK(slack(c, trailWithFalse(3, {x(1)})) == 0);
  CHECK(slack(c, trailWithFalse(3, {x(1), x(2)})) == -2);
}

TEST_CASE("unit literals on the running example") {
  PBConstraint c({{3, x(1)}, {2, x(2)}, {1, x(3)}}, 3);
  SUBCASE("x1 falsified forces the rest") {
    Trail t = trailWithFalse(3, {x(1)});
    std::vector<Lit> units = unitLiterals(c, t);
    REQUIRE(units.size() == 2);
    CHECK(units[0] == x(2));
    CHECK(units[1] == x(3));
  }
  SUBCASE("clause with two free literals never propagates") {
    PBConstraint clause({{1, x(1)}, {1, x(2)}}, 1);
    CHECK(unitLiterals(clause, Trail(2)).empty());
  }
  SUBCASE("boundary slack == a1 does not propagate") {
    CHECK(unitLiterals(c, Trail(3)).empty());
  }
  SUBCASE("conflicting constraint is rejected") {
    Trail t = trailWithFalse(3, {x(1), x(2)});
    CHECK_THROWS_AS(unitLiterals(c, t), std::invalid_argument);
  }
}

TEST_CASE("property: slack identities") {
  std::mt19937_64 rng(42);
  for (int it = 0; it < 2000; ++it) {
    int numVars = 1 + static_cast<int>(rng() % 8);
    RawConstraint rc = randomRaw(rng, numVars, 40);
    NormalizeResult norm = normalize(rc);
    if (norm.constraints.empty()) continue;
    const PBConstraint& c = norm.constraints[0];

    // slack(C, empty) = -degree + sum of coefficients
    Trail t(numVars);
    Wide total = 0;
    for (const Term& term : c.terms()) total += term.coef;
    REQUIRE(slack(c, t) == total - c.degree());

    // falsifying one literal drops slack by exactly its coefficient;
    // popping restores it
    int pick = static_cast<int>(rng() % c.size());
    Wide before = slack(c, t);
    t.assign(~c.lit(pick), std::nullopt);
    REQUIRE(slack(c, t) == before - c.coef(pick));
    t.pop();
    REQUIRE(slack(c, t) == before);

    // no units whenever slack >= a1
    if (slack(c, t) >= c.largestCoef()) REQUIRE(unitLiterals(c, t).empty());
  }
}

TEST_CASE("property: negative slack is unrecoverable by extension") {
  std::mt19937_64 rng(7);
  int tested = 0;
  for (int it = 0; it < 4000 && tested < 300; ++it) {
    int numVars = 2 + static_cast<int>(rng() % 5);
    RawConstraint rc = randomRaw(rng, numVars, 10);
    NormalizeResult norm = normalize(rc);
    if (norm.constraints.empty()) continue;
    const PBConstraint& c = norm.constraints[0];

    // falsify random literals until slack goes negative
    Trail t(numVars);
    std::vector<int> order(c.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    for (size_t i = 0; i < order.size(); ++i)
      std::swap(order[i], order[i + rng() % (order.size() - i)]);
    for (int idx : order) {
      if (slack(c, t) < 0) break;
      t.assign(~c.lit(idx), std::nullopt);
    }
    if (slack(c, t) >= 0) continue;
    ++tested;

    // every completion that keeps the falsified literals violates C
    uint64_t fixedMask = 0, fixedBits = 0;
    for (Var v = 1; v <= numVars; ++v)
      if (t.isAssigned(v)) {
        fixedBits |= uint64_t(1) << (v - 1);
        if (t.value(v) == LBool::True) fixedMask |= uint64_t(1) << (v - 1);
      }
    for (uint64_t mask = 0; mask < (uint64_t(1) << numVars); ++mask) {
      if ((mask & fixedBits) != fixedMask) continue;
      REQUIRE(!oracle::satisfiesConstraint(c, mask));
    }
  }
  CHECK(tested > 0);
}

TEST_CASE("instance tracks raw coefficients and trivial falsity") {
  Instance inst(3);
  inst.addRaw(raw({{-120, x(1)}, {2, x(2)}}, -50, Relation::GreaterEq));
  CHECK(inst.maxInputCoef() == 120);
  CHECK(!inst.triviallyFalse());
  inst.setObjective({{500, x(3)}});
  CHECK(inst.maxInputCoef() == 120);  // objective does not participate
  inst.addRaw(raw({{1, x(1)}, {-1, x(1)}}, 3, Relation::GreaterEq));
  CHECK(inst.triviallyFalse());
}
