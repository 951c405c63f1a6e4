/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#pragma once

#include <optional>
#include <string>

#include "pbhyb/model.hpp"

namespace pbhyb {

/// Which propagation engine a constraint is attached to. The choice is made
/// once, when the constraint is added, and never revisited.
enum class DispatchMode {
  PureCounting,
  PureWatched,
  DefaultHybrid,   // minimal-watch-fraction rule with parameter p
  Absolute,        // useCounting <- (a1 > c)
  Additive,        // useCounting <- (a1 > c + a2)
  Multiplicative,  // useCounting <- (a1 > c * a2)
  MaxGap,          // useCounting <- (c > max consecutive coefficient gap)
  Auto,            // DefaultHybrid on small instances, autoInner otherwise
};

struct HeuristicConfig {
  DispatchMode mode = DispatchMode::DefaultHybrid;
  Rational propCounting{7, 10};  // p, in [0, 1]
  Coef cutoff = 500;             // c, >= 0
  DispatchMode autoInner = DispatchMode::Additive;
  bool maxGapInvert = false;

  bool valid() const {
    return propCounting >= Rational(0) && propCounting <= Rational(1) && cutoff >= 0 &&
           (autoInner == DispatchMode::Absolute || autoInner == DispatchMode::Additive ||
            autoInner == DispatchMode::Multiplicative || autoInner == DispatchMode::MaxGap);
  }
};

struct DispatchDecision {
  bool useCounting = false;
  /// Minimal number of watched literals needed to cover degree + a1;
  /// populated by the default hybrid rule only.
  std::optional<int> minWatches;
};

/// The stock hybrid rule: compute the minimal watch count m by summing
/// coefficients a2, a3, ... against the degree, then count the constraint
/// when p = 1 or p > 1 - m/n. The comparison is exact rational arithmetic.
DispatchDecision decideDefaultHybrid(const PBConstraint& c, const Rational& p);

/// useCounting <- (a1 > c).
DispatchDecision decideAbsolute(const PBConstraint& c, Coef cutoff);

/// useCounting <- (a1 > c + a2), with a2 := 0 for single-term constraints.
DispatchDecision decideAdditive(const PBConstraint& c, Coef cutoff);

/// useCounting <- (a1 > c * a2), with a2 := 1 for single-term constraints.
/// The factor may be a non-integer rational.
DispatchDecision decideMultiplicative(const PBConstraint& c, const Rational& cutoff);

/// useCounting <- (c > max_i (a_i - a_{i+1})), gap 0 for single terms.
/// `invert` flips the branch selection.
DispatchDecision decideMaxGap(const PBConstraint& c, Coef cutoff, bool invert = false);

/// Dispatches one constraint under the configured mode. Auto applies the
/// default hybrid rule when the instance is small (all raw input
/// coefficients < 100) and the configured inner heuristic otherwise.
DispatchDecision dispatch(const PBConstraint& c, const HeuristicConfig& cfg,
                          bool instanceIsSmall);

/// Mode label grammar used by the CLI and the bench harness: "counting",
/// "watched", "hybrid[:p]", "add[:c]", "abs[:c]", "mul[:c]", "gap[:c]",
/// "auto[:c]". Labels round-trip through parse and format.
HeuristicConfig parseModeLabel(const std::string& label);
std::string modeLabel(const HeuristicConfig& cfg);

}  // namespace pbhyb
