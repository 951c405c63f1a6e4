/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#include "pbhyb/solver.hpp"

#include <algorithm>
#include <chrono>

namespace pbhyb {

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Luby restart sequence: 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ...
uint64_t luby(uint64_t i) {
  uint64_t size = 1, seq = 0;
  while (size < i + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != i) {
    size = (size - 1) >> 1;
    --seq;
    i = i % size;
  }
  return uint64_t(1) << seq;
}

constexpr double kVarDecay = 0.95;
constexpr double kClaDecay = 0.999;

}  // namespace

std::string statusName(Status s) {
  switch (s) {
    case Status::Sat: return "SAT";
    case Status::Unsat: return "UNSAT";
    case Status::Optimum: return "OPTIMUM";
    case Status::Timeout: return "TIMEOUT";
  }
  return "?";
}

Solver::Solver(const Instance& instance, HeuristicConfig cfg, SolverOptions opts)
    : instance_(instance),
      cfg_(cfg),
      opts_(opts),
      instanceSmall_(instance.maxInputCoef() < 100),
      trail_(instance.numVars()),
      engine_(instance.numVars()) {
  if (!cfg_.valid()) throw std::invalid_argument("invalid heuristic configuration");
  activity_.assign(instance_.numVars() + 1, 0.0);
  phase_.assign(instance_.numVars() + 1, false);
  seen_.assign(instance_.numVars() + 1, 0);
}

bool Solver::enqueue(const PropResult& result) {
  bool any = false;
  for (const Propagation& p : result.propagations) {
    if (trail_.isTrue(p.lit)) continue;   // another constraint got there first
    if (trail_.isFalse(p.lit)) continue;  // opposing unit; the conflict surfaces on its visit
    trail_.assign(p.lit, p.reason);
    ++stats_.propagations;
    any = true;
  }
  return any;
}

bool Solver::addConstraintNow(const PBConstraint& c, bool learned) {
  DispatchDecision d = dispatch(c, cfg_, instanceSmall_);
  EngineKind kind = d.useCounting ? EngineKind::Counting : EngineKind::Watched;
  PropEngine::Registered reg = engine_.registerConstraint(c, kind, trail_);
  claActivity_.resize(engine_.numConstraints(), 0.0);
  if (learned) {
    learnedIds_.push_back(reg.id);
    ++stats_.learnedClauses;
  }
  if (reg.result.isConflict()) {
    assert(trail_.currentLevel() == 0);
    return false;
  }
  enqueue(reg.result);
  return true;
}

bool Solver::loadInstance() {
  loaded_ = true;
  if (instance_.triviallyFalse()) {
    rootUnsat_ = true;
    return false;
  }
  for (const PBConstraint& c : instance_.constraints()) {
    if (!addConstraintNow(c, /*learned=*/false)) {
      rootUnsat_ = true;
      return false;
    }
    if (propagateToFixpoint()) {
      rootUnsat_ = true;
      return false;
    }
  }
  return true;
}

std::optional<ConstraintId> Solver::propagateToFixpoint() {
  while (qhead_ < trail_.size()) {
    Lit l = trail_.litAt(qhead_++);
    PropResult r = engine_.onAssign(l, trail_);
    if (r.isConflict()) return r.conflict;
    enqueue(r);
  }
  if (opts_.audit) engine_.auditInvariants(trail_);
  return std::nullopt;
}

void Solver::backjumpTo(int level) {
  assert(level >= 0);
  while (trail_.currentLevel() > level) {
    int pos = trail_.size() - 1;
    bool processed = pos < qhead_;
    Lit l = trail_.pop();
    if (processed) engine_.onUnassign(l);
    phase_[l.var()] = !l.negated();  // phase saving
  }
  // never move the queue head forward: a backjump that pops nothing (e.g. a
  // restart right after learning a unit) must leave pending entries pending
  qhead_ = std::min(qhead_, trail_.size());
}

Lit Solver::pickDecision() {
  Var best = 0;
  for (Var v = 1; v <= instance_.numVars(); ++v) {
    if (trail_.isAssigned(v)) continue;
    if (best == 0 || activity_[v] > activity_[best]) best = v;
  }
  if (best == 0) return Lit();
  return Lit::make(best, !phase_[best]);
}

void Solver::bumpVarActivity(Var v) {
  if ((activity_[v] += varInc_) > 1e100) {
    for (double& a : activity_) a *= 1e-100;
    varInc_ *= 1e-100;
  }
}

void Solver::bumpClauseActivity(ConstraintId id) {
  if ((claActivity_[id] += claInc_) > 1e20) {
    for (double& a : claActivity_) a *= 1e-20;
    claInc_ *= 1e-20;
  }
}

std::optional<std::pair<std::vector<Lit>, int>> Solver::analyzeConflict(
    ConstraintId conflict) {
  if (trail_.currentLevel() == 0) return std::nullopt;
  const int curLevel = trail_.currentLevel();
  std::fill(seen_.begin(), seen_.end(), 0);
  std::vector<Lit> learned;
  learned.push_back(Lit());  // slot for the asserting literal
  int counter = 0;

  // Adds one falsified literal of a clause-weakened constraint.
  auto considerLit = [&](Lit q) {
    Var v = q.var();
    assert(trail_.isFalse(q));
    int lv = trail_.levelOf(v);
    if (seen_[v] || lv == 0) return;
    seen_[v] = 1;
    bumpVarActivity(v);
    if (lv >= curLevel)
      ++counter;
    else
      learned.push_back(q);
  };

  // Conflict side: the clause over all its falsified literals.
  {
    const PBConstraint& c = engine_.constraint(conflict);
    bumpClauseActivity(conflict);
    for (const Term& t : c.terms())
      if (trail_.isFalse(t.lit)) considerLit(t.lit);
  }
  assert(counter > 0);

  // First-UIP resolution walking the trail backwards. Reasons are weakened
  // to the clause {propagated literal} + {literals falsified before it}.
  int index = trail_.size() - 1;
  Lit uip;
  while (true) {
    while (index >= 0 && !(seen_[trail_.litAt(index).var()] &&
                           trail_.levelOf(trail_.litAt(index).var()) == curLevel))
      --index;
    assert(index >= 0);
    Lit t = trail_.litAt(index);
    --index;
    seen_[t.var()] = 0;
    --counter;
    if (counter == 0) {
      uip = t;
      break;
    }
    std::optional<ConstraintId> r = trail_.reason(t.var());
    assert(r.has_value());  // only the UIP may be reasonless at this level
    const PBConstraint& rc = engine_.constraint(*r);
    bumpClauseActivity(*r);
    const int tPos = trail_.position(t.var());
    for (const Term& term : rc.terms()) {
      if (term.lit == t) continue;
      if (trail_.isFalse(term.lit) && trail_.position(term.lit.var()) < tPos)
        considerLit(term.lit);
    }
  }
  learned[0] = ~uip;

  int backjumpLevel = 0;
  for (size_t i = 1; i < learned.size(); ++i)
    backjumpLevel = std::max(backjumpLevel, trail_.levelOf(learned[i].var()));
  return std::make_pair(std::move(learned), backjumpLevel);
}

void Solver::reduceLearnedDb() {
  std::vector<char> locked(engine_.numConstraints(), 0);
  for (int pos = 0; pos < trail_.size(); ++pos) {
    auto r = trail_.reason(trail_.litAt(pos).var());
    if (r) locked[*r] = 1;
  }
  std::vector<ConstraintId> order = learnedIds_;
  std::sort(order.begin(), order.end(), [&](ConstraintId a, ConstraintId b) {
    if (claActivity_[a] != claActivity_[b]) return claActivity_[a] < claActivity_[b];
    return a < b;  // older first among equals
  });
  size_t target = order.size() / 2;
  size_t removed = 0;
  for (ConstraintId id : order) {
    if (removed >= target) break;
    if (locked[id]) continue;
    engine_.markDeleted(id);
    ++removed;
  }
  std::erase_if(learnedIds_, [&](ConstraintId id) { return engine_.isDeleted(id); });
  stats_.deletedClauses += removed;
}

Solver::SearchOutcome Solver::search(const Budget& budget, double deadlineSec) {
  const auto start = Clock::now();
  uint64_t restartNum = 0;
  uint64_t conflictsSinceRestart = 0;
  uint64_t restartLimit = luby(restartNum) * opts_.lubyBase;

  while (true) {
    std::optional<ConstraintId> confl = propagateToFixpoint();
    if (confl) {
      if (trail_.currentLevel() == 0) return SearchOutcome::Unsat;
      ++stats_.conflicts;
      ++conflictsSinceRestart;
      varInc_ /= kVarDecay;
      claInc_ /= kClaDecay;
      auto analyzed = analyzeConflict(*confl);
      if (!analyzed) return SearchOutcome::Unsat;
      auto& [lits, backjumpLevel] = *analyzed;
      backjumpTo(backjumpLevel);
      std::vector<Term> terms;
      terms.reserve(lits.size());
      for (Lit l : lits) terms.push_back(Term{1, l});
      std::sort(terms.begin(), terms.end(),
                [](const Term& a, const Term& b) { return a.lit.var() < b.lit.var(); });
      bool ok = addConstraintNow(PBConstraint(std::move(terms), 1), /*learned=*/true);
      assert(ok);
      (void)ok;
      if (learnedIds_.size() >= opts_.maxLearned) reduceLearnedDb();
      if (conflictsSinceRestart >= restartLimit) {
        ++stats_.restarts;
        backjumpTo(0);
        conflictsSinceRestart = 0;
        restartLimit = luby(++restartNum) * opts_.lubyBase;
      }
      if (stats_.conflicts >= budget.conflictLimit) return SearchOutcome::Timeout;
      if (secondsSince(start) >= deadlineSec) return SearchOutcome::Timeout;
    } else {
      if (secondsSince(start) >= deadlineSec) return SearchOutcome::Timeout;
      Lit decision = pickDecision();
      if (!decision.valid()) return SearchOutcome::Sat;
      ++stats_.decisions;
      trail_.newLevel();
      trail_.assign(decision, std::nullopt);
    }
  }
}

std::vector<bool> Solver::extractModel() const {
  std::vector<bool> model(instance_.numVars() + 1, false);
  for (Var v = 1; v <= instance_.numVars(); ++v) {
    assert(trail_.isAssigned(v));
    model[v] = trail_.value(v) == LBool::True;
  }
  return model;
}

void Solver::verifyModel(const std::vector<bool>& model) const {
  for (const PBConstraint& c : instance_.constraints()) {
    Wide lhs = 0;
    for (const Term& t : c.terms()) {
      bool litTrue = model[t.lit.var()] != t.lit.negated();
      if (litTrue) lhs += t.coef;
    }
    if (lhs < c.degree())
      throw std::logic_error("internal error: reported model violates constraint " + c.str());
  }
}

Coef Solver::objectiveValue(const std::vector<bool>& model) const {
  assert(instance_.objective());
  Wide v = 0;
  for (const ObjectiveTerm& t : *instance_.objective()) {
    bool litTrue = model[t.lit.var()] != t.lit.negated();
    if (litTrue) v += t.coef;
  }
  if (v > std::numeric_limits<Coef>::max() || v < std::numeric_limits<Coef>::min())
    throw OverflowError("objective value exceeds 63 bits");
  return static_cast<Coef>(v);
}

SolveResult Solver::solve(const Budget& budget) {
  const auto start = Clock::now();
  SolveResult result;
  if (!loaded_) loadInstance();
  if (rootUnsat_) {
    result.status = Status::Unsat;
  } else {
    switch (search(budget, budget.timeLimitSec)) {
      case SearchOutcome::Sat: {
        std::vector<bool> model = extractModel();
        verifyModel(model);
        result.status = Status::Sat;
        result.model = model;
        if (instance_.objective()) result.objectiveValue = objectiveValue(model);
        backjumpTo(0);
        break;
      }
      case SearchOutcome::Unsat:
        result.status = Status::Unsat;
        break;
      case SearchOutcome::Timeout:
        result.status = Status::Timeout;
        break;
    }
  }
  stats_.seconds += secondsSince(start);
  stats_.prop = engine_.counters();
  result.stats = stats_;
  return result;
}

SolveResult Solver::optimize(const Budget& budget) {
  if (!instance_.objective())
    throw std::invalid_argument("optimize requires an instance with an objective");
  const auto start = Clock::now();
  SolveResult result;
  std::optional<std::vector<bool>> best;
  std::optional<Coef> bestValue;

  auto finish = [&](Status status) {
    result.status = status;
    result.model = best;
    result.objectiveValue = bestValue;
    stats_.seconds += secondsSince(start);
    stats_.prop = engine_.counters();
    result.stats = stats_;
    return result;
  };

  if (!loaded_) loadInstance();
  if (rootUnsat_) return finish(Status::Unsat);

  while (true) {
    double remaining = budget.timeLimitSec - secondsSince(start);
    if (remaining <= 0) return finish(Status::Timeout);
    SearchOutcome outcome = search(budget, remaining);
    if (outcome == SearchOutcome::Timeout) return finish(Status::Timeout);
    if (outcome == SearchOutcome::Unsat)
      return finish(best ? Status::Optimum : Status::Unsat);

    std::vector<bool> model = extractModel();
    verifyModel(model);
    Coef value = objectiveValue(model);
    assert(!bestValue || value < *bestValue);
    best = std::move(model);
    bestValue = value;
    if (onImprove) onImprove(value);

    // Add objective <= value - 1 at the root and keep searching.
    if (value == std::numeric_limits<Coef>::min()) return finish(Status::Optimum);
    backjumpTo(0);
    RawConstraint bound;
    for (const ObjectiveTerm& t : *instance_.objective())
      bound.terms.push_back(RawTerm{t.coef, t.lit});
    bound.rhs = value - 1;
    bound.rel = Relation::LessEq;
    NormalizeResult norm = normalize(bound, opts_.normalize);
    if (norm.triviallyFalse) return finish(Status::Optimum);
    bool conflicted = false;
    for (const PBConstraint& c : norm.constraints) {
      if (!addConstraintNow(c, /*learned=*/false)) {
        conflicted = true;
        break;
      }
      if (propagateToFixpoint()) {
        conflicted = true;
        break;
      }
    }
    if (conflicted) return finish(Status::Optimum);
  }
}

SolveResult runSolver(const Instance& instance, const HeuristicConfig& cfg,
                      const Budget& budget, const SolverOptions& opts) {
  Solver solver(instance, cfg, opts);
  if (instance.objective()) return solver.optimize(budget);
  return solver.solve(budget);
}

}  // namespace pbhyb
