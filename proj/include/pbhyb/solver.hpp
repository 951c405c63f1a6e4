/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#pragma once

#include <functional>
#include <limits>

#include "pbhyb/heuristics.hpp"
#include "pbhyb/propagation.hpp"

namespace pbhyb {

enum class Status { Sat, Unsat, Optimum, Timeout };

std::string statusName(Status s);

struct SolverStats {
  uint64_t conflicts = 0;
  uint64_t decisions = 0;
  uint64_t propagations = 0;
  uint64_t restarts = 0;
  uint64_t learnedClauses = 0;
  uint64_t deletedClauses = 0;
  double seconds = 0.0;
  PropCounters prop;
};

struct SolveResult {
  Status status = Status::Timeout;
  /// Full assignment, indexed 1..numVars; present for Sat and Optimum, and
  /// for Timeout when an improving model was found before the deadline.
  std::optional<std::vector<bool>> model;
  /// Objective value of `model` under the instance objective.
  std::optional<Coef> objectiveValue;
  SolverStats stats;
};

struct Budget {
  double timeLimitSec = std::numeric_limits<double>::infinity();
  uint64_t conflictLimit = std::numeric_limits<uint64_t>::max();
};

struct SolverOptions {
  /// Run the engine invariant audits after every propagation fixpoint.
  bool audit = false;
  uint64_t lubyBase = 100;
  uint64_t maxLearned = 100000;  // deletion threshold for learned clauses
  /// Applied to constraints the solver creates itself (objective bounds).
  NormalizeOptions normalize;
};

/// CDCL search over pseudo-boolean constraints. Propagation is pluggable:
/// every constraint, input or learned, is attached to the counting or the
/// watched engine by the configured dispatch heuristic when it is added.
/// Conflict analysis learns clauses via first-UIP resolution over
/// clause-weakened reasons.
class Solver {
 public:
  Solver(const Instance& instance, HeuristicConfig cfg, SolverOptions opts = {});

  /// Decision query: Sat with a verified model, Unsat, or Timeout.
  SolveResult solve(const Budget& budget = {});

  /// Solution-improving search for instances with an objective: each model
  /// adds the bound objective <= value - 1 and the search continues until
  /// unsatisfiable (Optimum) or out of budget (Timeout with best-so-far).
  SolveResult optimize(const Budget& budget = {});

  /// Called with each improving objective value during optimize().
  std::function<void(Coef)> onImprove;

  const SolverStats& stats() const { return stats_; }
  const PropEngine& engine() const { return engine_; }

 private:
  enum class SearchOutcome { Sat, Unsat, Timeout };

  bool loadInstance();  // false when root conflict proves Unsat
  SearchOutcome search(const Budget& budget, double deadline);
  std::optional<ConstraintId> propagateToFixpoint();
  bool enqueue(const PropResult& result);
  void backjumpTo(int level);
  Lit pickDecision();
  /// 1UIP clause learning; returns the learned clause literals (asserting
  /// literal first) and the backjump level, or nothing when the conflict
  /// proves unsatisfiability at level 0.
  std::optional<std::pair<std::vector<Lit>, int>> analyzeConflict(ConstraintId conflict);
  bool addConstraintNow(const PBConstraint& c, bool learned);
  void bumpVarActivity(Var v);
  void bumpClauseActivity(ConstraintId id);
  void reduceLearnedDb();
  std::vector<bool> extractModel() const;
  void verifyModel(const std::vector<bool>& model) const;
  Coef objectiveValue(const std::vector<bool>& model) const;

  Instance instance_;
  HeuristicConfig cfg_;
  SolverOptions opts_;
  bool instanceSmall_;

  Trail trail_;
  PropEngine engine_;
  int qhead_ = 0;

  std::vector<double> activity_;   // by var
  double varInc_ = 1.0;
  std::vector<bool> phase_;        // by var, saved polarity (default false)

  std::vector<ConstraintId> learnedIds_;
  std::vector<double> claActivity_;  // by constraint id
  double claInc_ = 1.0;

  // analyze scratch
  std::vector<char> seen_;

  SolverStats stats_;
  bool rootUnsat_ = false;
  bool loaded_ = false;
};

/// Convenience wrappers: construct a solver and run the appropriate query
/// (optimize when the instance has an objective, solve otherwise).
SolveResult runSolver(const Instance& instance, const HeuristicConfig& cfg,
                      const Budget& budget = {}, const SolverOptions& opts = {});

}  // namespace pbhyb
