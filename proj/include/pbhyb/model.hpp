/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pbhyb/types.hpp"

namespace pbhyb {

struct Term {
  Coef coef;  // strictly positive
  Lit lit;

  friend bool operator==(const Term& a, const Term& b) {
    return a.coef == b.coef && a.lit == b.lit;
  }
};

/// A pseudo-boolean constraint in normal form:
///
///     sum_i coef_i * lit_i >= degree
///
/// with strictly positive integer coefficients sorted in descending order,
/// at most one term per variable, and degree >= 1. Saturation (coef capped
/// at the degree) is applied by normalize() unless disabled there.
class PBConstraint {
 public:
  PBConstraint(std::vector<Term> terms, Coef degree, ConstraintId id = kNoConstraint);

  int size() const { return static_cast<int>(terms_.size()); }  // n
  const Term& term(int i) const { return terms_[i]; }
  Coef coef(int i) const { return terms_[i].coef; }
  Lit lit(int i) const { return terms_[i].lit; }
  std::span<const Term> terms() const { return terms_; }
  Coef degree() const { return degree_; }
  Coef largestCoef() const { return terms_.empty() ? 0 : terms_.front().coef; }
  ConstraintId id() const { return id_; }

  PBConstraint withId(ConstraintId id) const {
    PBConstraint c(*this);
    c.id_ = id;
    return c;
  }

  /// Semantic identity of the stored form (terms and degree, id ignored).
  friend bool operator==(const PBConstraint& a, const PBConstraint& b) {
    return a.degree_ == b.degree_ && a.terms_ == b.terms_;
  }

  std::string str() const;

 private:
  std::vector<Term> terms_;
  Coef degree_;
  ConstraintId id_;
};

/// Partial assignment with decision levels and reasons. Assignments push in
/// stack order; unassignment is LIFO only.
class Trail {
 public:
  explicit Trail(int numVars = 0);

  int numVars() const { return numVars_; }
  void growTo(int numVars);

  LBool value(Var v) const { return value_[v]; }
  bool isAssigned(Var v) const { return value_[v] != LBool::Undef; }
  bool isTrue(Lit l) const {
    return value_[l.var()] == (l.negated() ? LBool::False : LBool::True);
  }
  bool isFalse(Lit l) const {
    return value_[l.var()] == (l.negated() ? LBool::True : LBool::False);
  }
  bool isFree(Lit l) const { return value_[l.var()] == LBool::Undef; }

  int currentLevel() const { return static_cast<int>(levelStart_.size()) - 1; }
  void newLevel() { levelStart_.push_back(size()); }

  void assign(Lit l, std::optional<ConstraintId> reason);
  /// Pops the most recent assignment, dropping any level that becomes empty.
  Lit pop();

  int size() const { return static_cast<int>(stack_.size()); }
  Lit litAt(int pos) const { return stack_[pos].lit; }
  int levelAt(int pos) const { return stack_[pos].level; }

  int position(Var v) const { return pos_[v]; }          // -1 when unassigned
  int levelOf(Var v) const;                              // -1 when unassigned
  std::optional<ConstraintId> reason(Var v) const;

  int levelStart(int level) const { return levelStart_[level]; }

 private:
  struct Entry {
    Lit lit;
    int level;
    std::optional<ConstraintId> reason;
  };
  int numVars_ = 0;
  std::vector<LBool> value_;      // by var
  std::vector<int> pos_;          // by var, -1 when unassigned
  std::vector<Entry> stack_;
  std::vector<int> levelStart_;   // levelStart_[k] = first stack position of level k
};

enum class Relation { GreaterEq, LessEq, Equal };

struct RawTerm {
  Coef coef;  // signed; zero terms are dropped
  Lit lit;
};

/// A constraint as read from input: signed coefficients, any relation,
/// possibly several terms on one variable.
struct RawConstraint {
  std::vector<RawTerm> terms;
  Coef rhs = 0;
  Relation rel = Relation::GreaterEq;
};

struct NormalizeOptions {
  bool saturate = true;
  int maxCoefBits = 63;  // raw |coef| must fit in this many bits
};

struct NormalizeResult {
  std::vector<PBConstraint> constraints;  // 0, 1 or 2 entries
  bool triviallyFalse = false;            // contradictory constant constraint
  int droppedTautologies = 0;             // trivially-true pieces omitted
};

/// Rewrites a raw constraint into >= normal form. Duplicate variables are
/// merged by summing signed coefficients, negative coefficients move to the
/// complemented literal, coefficients are sorted descending and saturated.
/// Equalities split into two constraints. Tautologies are dropped from the
/// output; a contradictory constant constraint sets triviallyFalse.
NormalizeResult normalize(const RawConstraint& raw, const NormalizeOptions& opts = {});

/// slack(C, rho) = -degree + sum of coefficients whose literal is not
/// falsified by rho. Negative slack means C cannot be satisfied without
/// unassigning.
Wide slack(const PBConstraint& c, const Trail& trail);

/// The unassigned literals l_i with slack(C, rho) < coef_i; these must all be
/// set true. Throws std::invalid_argument when the constraint is already
/// conflicting (slack < 0), where propagation is undefined.
std::vector<Lit> unitLiterals(const PBConstraint& c, const Trail& trail);

struct ObjectiveTerm {
  Coef coef;  // signed
  Lit lit;

  friend bool operator==(const ObjectiveTerm& a, const ObjectiveTerm& b) {
    return a.coef == b.coef && a.lit == b.lit;
  }
};

/// A parsed problem: normalized constraints plus an optional minimization
/// objective. Tracks the largest raw input coefficient seen across
/// constraint lines, which instance classification relies on.
class Instance {
 public:
  explicit Instance(int numVars = 0) : numVars_(numVars) {}

  int numVars() const { return numVars_; }
  void growTo(int numVars) { numVars_ = std::max(numVars_, numVars); }

  /// Normalizes and stores a raw constraint, recording its raw coefficient
  /// magnitudes before any rewriting.
  void addRaw(const RawConstraint& raw, const NormalizeOptions& opts = {});

  const std::vector<PBConstraint>& constraints() const { return constraints_; }

  void setObjective(std::vector<ObjectiveTerm> objective);
  const std::optional<std::vector<ObjectiveTerm>>& objective() const { return objective_; }

  /// Largest |raw coefficient| over all input constraint lines (objective
  /// excluded); independent of normalization settings.
  Coef maxInputCoef() const { return maxInputCoef_; }

  /// True when some input constraint normalized to a contradiction.
  bool triviallyFalse() const { return triviallyFalse_; }

 private:
  int numVars_ = 0;
  std::vector<PBConstraint> constraints_;
  std::optional<std::vector<ObjectiveTerm>> objective_;
  Coef maxInputCoef_ = 0;
  bool triviallyFalse_ = false;
};

}  // namespace pbhyb
