/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#include "pbhyb/heuristics.hpp"

namespace pbhyb {

DispatchDecision decideDefaultHybrid(const PBConstraint& c, const Rational& p) {
  int n = c.size();
  assert(n >= 1);
  // m = minimal prefix of descending coefficients whose watch sum covers
  // degree + a1; the running sum starts at -degree and skips a1.
  Wide sum = -static_cast<Wide>(c.degree());
  int m = 1;
  while (m < n && sum < 0) {
    sum += c.coef(m);  // a_{m+1} in 1-based terms
    ++m;
  }
  bool useCounting =
      p == Rational(1) ||
      static_cast<Wide>(p.num) * n > static_cast<Wide>(p.den) * (n - m);  // p > 1 - m/n
  return DispatchDecision{useCounting, m};
}

DispatchDecision decideAbsolute(const PBConstraint& c, Coef cutoff) {
  return DispatchDecision{c.largestCoef() > cutoff, std::nullopt};
}

DispatchDecision decideAdditive(const PBConstraint& c, Coef cutoff) {
  Coef a2 = c.size() >= 2 ? c.coef(1) : 0;
  bool useCounting =
      static_cast<Wide>(c.largestCoef()) > static_cast<Wide>(cutoff) + a2;
  return DispatchDecision{useCounting, std::nullopt};
}

DispatchDecision decideMultiplicative(const PBConstraint& c, const Rational& cutoff) {
  Coef a2 = c.size() >= 2 ? c.coef(1) : 1;
  // a1 > (num/den) * a2  <=>  a1 * den > num * a2
  bool useCounting = static_cast<Wide>(c.largestCoef()) * cutoff.den >
                     static_cast<Wide>(cutoff.num) * a2;
  return DispatchDecision{useCounting, std::nullopt};
}

DispatchDecision decideMaxGap(const PBConstraint& c, Coef cutoff, bool invert) {
  Coef gap = 0;
  for (int i = 0; i + 1 < c.size(); ++i) gap = std::max(gap, c.coef(i) - c.coef(i + 1));
  bool predicate = cutoff > gap;
  return DispatchDecision{invert ? !predicate : predicate, std::nullopt};
}

DispatchDecision dispatch(const PBConstraint& c, const HeuristicConfig& cfg,
                          bool instanceIsSmall) {
  switch (cfg.mode) {
    case DispatchMode::PureCounting:
      return DispatchDecision{true, std::nullopt};
    case DispatchMode::PureWatched:
      return DispatchDecision{false, std::nullopt};
    case DispatchMode::DefaultHybrid:
      return decideDefaultHybrid(c, cfg.propCounting);
    case DispatchMode::Absolute:
      return decideAbsolute(c, cfg.cutoff);
    case DispatchMode::Additive:
      return decideAdditive(c, cfg.cutoff);
    case DispatchMode::Multiplicative:
      return decideMultiplicative(c, Rational(cfg.cutoff));
    case DispatchMode::MaxGap:
      return decideMaxGap(c, cfg.cutoff, cfg.maxGapInvert);
    case DispatchMode::Auto: {
      if (instanceIsSmall) return decideDefaultHybrid(c, cfg.propCounting);
      HeuristicConfig inner = cfg;
      inner.mode = cfg.autoInner;
      return dispatch(c, inner, /*instanceIsSmall=*/false);
    }
  }
  assert(false);
  return {};
}

namespace {

Coef parseCutoffParam(const std::string& text) {
  Rational r = Rational::fromDecimal(text);
  if (r.den != 1 || r.num < 0)
    throw std::invalid_argument("cut-off must be a non-negative integer: " + text);
  return r.num;
}

}  // namespace

HeuristicConfig parseModeLabel(const std::string& label) {
  HeuristicConfig cfg;
  std::string name = label;
  std::string param;
  if (size_t colon = label.find(':'); colon != std::string::npos) {
    name = label.substr(0, colon);
    param = label.substr(colon + 1);
  }
  if (name == "counting") {
    cfg.mode = DispatchMode::PureCounting;
  } else if (name == "watched") {
    cfg.mode = DispatchMode::PureWatched;
  } else if (name == "hybrid") {
    cfg.mode = DispatchMode::DefaultHybrid;
    if (!param.empty()) cfg.propCounting = Rational::fromDecimal(param);
  } else if (name == "add") {
    cfg.mode = DispatchMode::Additive;
    if (!param.empty()) cfg.cutoff = parseCutoffParam(param);
  } else if (name == "abs") {
    cfg.mode = DispatchMode::Absolute;
    if (!param.empty()) cfg.cutoff = parseCutoffParam(param);
  } else if (name == "mul") {
    cfg.mode = DispatchMode::Multiplicative;
    if (!param.empty()) cfg.cutoff = parseCutoffParam(param);
  } else if (name == "gap") {
    cfg.mode = DispatchMode::MaxGap;
    if (!param.empty()) cfg.cutoff = parseCutoffParam(param);
  } else if (name == "auto") {
    cfg.mode = DispatchMode::Auto;
    if (!param.empty()) cfg.cutoff = parseCutoffParam(param);
  } else {
    throw std::invalid_argument("unknown propagation mode: " + label);
  }
  if (!cfg.valid()) throw std::invalid_argument("invalid parameters in mode: " + label);
  return cfg;
}

std::string modeLabel(const HeuristicConfig& cfg) {
  switch (cfg.mode) {
    case DispatchMode::PureCounting:
      return "counting";
    case DispatchMode::PureWatched:
      return "watched";
    case DispatchMode::DefaultHybrid: {
      if (cfg.propCounting == Rational{7, 10}) return "hybrid";
      return "hybrid:" + cfg.propCounting.str();
    }
    case DispatchMode::Absolute:
      return "abs:" + std::to_string(cfg.cutoff);
    case DispatchMode::Additive:
      return "add:" + std::to_string(cfg.cutoff);
    case DispatchMode::Multiplicative:
      return "mul:" + std::to_string(cfg.cutoff);
    case DispatchMode::MaxGap:
      return "gap:" + std::to_string(cfg.cutoff);
    case DispatchMode::Auto:
      return "auto:" + std::to_string(cfg.cutoff);
  }
  return "?";
}

}  // namespace pbhyb
