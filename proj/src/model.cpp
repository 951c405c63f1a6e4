/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#include "pbhyb/model.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace pbhyb {

std::string toString(Wide v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  std::string digits;
  while (u > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

Rational Rational::fromDecimal(const std::string& text) {
  std::string s = text;
  bool neg = false;
  size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
  int64_t num = 0;
  int64_t den = 1;
  bool sawDigit = false;
  bool sawDot = false;
  for (; i < s.size(); ++i) {
    char ch = s[i];
    if (ch == '.') {
      if (sawDot) throw std::invalid_argument("bad decimal: " + text);
      sawDot = true;
      continue;
    }
    if (ch == '/') {
      // allow explicit fractions like 7/10
      int64_t d = std::stoll(s.substr(i + 1));
      if (!sawDigit || sawDot) throw std::invalid_argument("bad fraction: " + text);
      return Rational(neg ? -num : num, d);
    }
    if (ch < '0' || ch > '9') throw std::invalid_argument("bad decimal: " + text);
    sawDigit = true;
    if (num > (std::numeric_limits<int64_t>::max() - 9) / 10)
      throw std::invalid_argument("decimal out of range: " + text);
    num = num * 10 + (ch - '0');
    if (sawDot) {
      if (den > std::numeric_limits<int64_t>::max() / 10)
        throw std::invalid_argument("decimal out of range: " + text);
      den *= 10;
    }
  }
  if (!sawDigit) throw std::invalid_argument("bad decimal: " + text);
  return Rational(neg ? -num : num, den);
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

PBConstraint::PBConstraint(std::vector<Term> terms, Coef degree, ConstraintId id)
    : terms_(std::move(terms)), degree_(degree), id_(id) {
  assert(degree_ >= 1);
  for (size_t i = 0; i < terms_.size(); ++i) {
    assert(terms_[i].coef > 0);
    assert(terms_[i].lit.valid());
    if (i + 1 < terms_.size()) assert(terms_[i].coef >= terms_[i + 1].coef);
  }
#ifndef NDEBUG
  std::vector<Var> vars;
  for (const Term& t : terms_) vars.push_back(t.lit.var());
  std::sort(vars.begin(), vars.end());
  assert(std::adjacent_find(vars.begin(), vars.end()) == vars.end());
#endif
}

std::string PBConstraint::str() const {
  std::ostringstream out;
  for (const Term& t : terms_) {
    out << "+" << t.coef << " " << (t.lit.negated() ? "~x" : "x") << t.lit.var() << " ";
  }
  out << ">= " << degree_;
  return out.str();
}

Trail::Trail(int numVars) { growTo(numVars); }

void Trail::growTo(int numVars) {
  if (numVars <= numVars_ && numVars_ > 0) return;
  numVars_ = std::max(numVars_, numVars);
  value_.resize(numVars_ + 1, LBool::Undef);
  pos_.resize(numVars_ + 1, -1);
  if (levelStart_.empty()) levelStart_.push_back(0);
}

void Trail::assign(Lit l, std::optional<ConstraintId> reason) {
  assert(l.valid() && l.var() <= numVars_);
  assert(isFree(l));
  value_[l.var()] = l.negated() ? LBool::False : LBool::True;
  pos_[l.var()] = size();
  stack_.push_back(Entry{l, currentLevel(), reason});
}

Lit Trail::pop() {
  assert(!stack_.empty());
  Entry e = stack_.back();
  stack_.pop_back();
  value_[e.lit.var()] = LBool::Undef;
  pos_[e.lit.var()] = -1;
  // dissolve levels whose entries are all gone, including the one this pop emptied
  while (levelStart_.size() > 1 && levelStart_.back() >= size()) levelStart_.pop_back();
  return e.lit;
}

int Trail::levelOf(Var v) const {
  int p = pos_[v];
  return p < 0 ? -1 : stack_[p].level;
}

std::optional<ConstraintId> Trail::reason(Var v) const {
  int p = pos_[v];
  return p < 0 ? std::nullopt : stack_[p].reason;
}

namespace {

void checkRawWidth(Coef c, int maxBits) {
  // |c| must fit in maxBits bits; maxBits = 63 admits the full int64 range.
  if (maxBits >= 63) return;
  Wide bound = static_cast<Wide>(1) << maxBits;
  if (c >= bound || c <= -bound)
    throw OverflowError("coefficient " + std::to_string(c) + " exceeds the " +
                        std::to_string(maxBits) + "-bit input limit");
}

// Builds one >= constraint from merged signed terms. Returns nullopt for a
// tautology (flagging *tautology) or an unsatisfiable constant constraint
// (flagging *contradiction).
std::optional<PBConstraint> buildGeq(const std::map<Var, std::pair<Coef, bool>>& merged,
                                     Wide rhs, bool saturate, bool* contradiction,
                                     bool* tautology) {
  std::vector<Term> terms;
  Wide degree = rhs;
  for (const auto& [v, entry] : merged) {
    auto [coef, negated] = entry;
    if (coef == 0) continue;
    if (coef > 0) {
      terms.push_back(Term{coef, Lit::make(v, negated)});
    } else {
      // -c*l >= r  becomes  c*(1-l) >= r + c, i.e. c*~l with degree shift
      terms.push_back(Term{-coef, ~Lit::make(v, negated)});
      degree += -static_cast<Wide>(coef);
    }
  }
  if (degree <= 0) {
    *tautology = true;
    return std::nullopt;
  }
  if (terms.empty()) {
    *contradiction = true;
    return std::nullopt;
  }
  if (degree > std::numeric_limits<Coef>::max())
    throw OverflowError("normalized degree " + toString(degree) + " exceeds 63 bits");
  Coef b = static_cast<Coef>(degree);
  if (saturate)
    for (Term& t : terms) t.coef = std::min(t.coef, b);
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    return a.coef != b.coef ? a.coef > b.coef : a.lit.var() < b.lit.var();
  });
  return PBConstraint(std::move(terms), b);
}

}  // namespace

NormalizeResult normalize(const RawConstraint& raw, const NormalizeOptions& opts) {
  // Merge duplicate variables by summing signed coefficients; a term on the
  // complemented literal counts as (c - c*l) on the base literal.
  std::map<Var, std::pair<Coef, bool>> merged;  // var -> (coef, base polarity)
  Wide rhsShift = 0;
  for (const RawTerm& t : raw.terms) {
    checkRawWidth(t.coef, opts.maxCoefBits);
    if (t.coef == 0) continue;
    Var v = t.lit.var();
    auto it = merged.find(v);
    if (it == merged.end()) {
      merged.emplace(v, std::make_pair(t.coef, t.lit.negated()));
      continue;
    }
    Coef add = t.coef;
    if (t.lit.negated() != it->second.second) {
      // c*~l = c - c*l relative to the stored polarity
      rhsShift -= add;
      add = -add;
    }
    Wide sum = static_cast<Wide>(it->second.first) + add;
    if (sum > std::numeric_limits<Coef>::max() || sum < std::numeric_limits<Coef>::min())
      throw OverflowError("merged coefficient exceeds 63 bits");
    it->second.first = static_cast<Coef>(sum);
  }

  NormalizeResult result;
  bool contradiction = false;
  if (raw.rel == Relation::GreaterEq || raw.rel == Relation::Equal) {
    bool tautology = false;
    auto c = buildGeq(merged, static_cast<Wide>(raw.rhs) + rhsShift, opts.saturate,
                      &contradiction, &tautology);
    if (c) result.constraints.push_back(std::move(*c));
    result.droppedTautologies += tautology;
  }
  if (raw.rel == Relation::LessEq || raw.rel == Relation::Equal) {
    std::map<Var, std::pair<Coef, bool>> flipped = merged;
    for (auto& [v, entry] : flipped) entry.first = -entry.first;
    bool tautology = false;
    auto c = buildGeq(flipped, -(static_cast<Wide>(raw.rhs) + rhsShift), opts.saturate,
                      &contradiction, &tautology);
    if (c) result.constraints.push_back(std::move(*c));
    result.droppedTautologies += tautology;
  }
  result.triviallyFalse = contradiction;
  return result;
}

Wide slack(const PBConstraint& c, const Trail& trail) {
  Wide s = -static_cast<Wide>(c.degree());
  for (const Term& t : c.terms())
    if (!trail.isFalse(t.lit)) s += t.coef;
  return s;
}

std::vector<Lit> unitLiterals(const PBConstraint& c, const Trail& trail) {
  Wide s = slack(c, trail);
  if (s < 0)
    throw std::invalid_argument("conflicting constraint, propagation undefined: " + c.str());
  std::vector<Lit> units;
  for (const Term& t : c.terms()) {
    if (t.coef <= s) break;  // descending order: no later term can exceed s
    if (trail.isFree(t.lit)) units.push_back(t.lit);
  }
  return units;
}

void Instance::addRaw(const RawConstraint& raw, const NormalizeOptions& opts) {
  for (const RawTerm& t : raw.terms) {
    growTo(t.lit.var());
    Coef mag = t.coef < 0 ? -t.coef : t.coef;
    maxInputCoef_ = std::max(maxInputCoef_, mag);
  }
  NormalizeResult r = normalize(raw, opts);
  if (r.triviallyFalse) triviallyFalse_ = true;
  for (PBConstraint& c : r.constraints) {
    constraints_.push_back(c.withId(static_cast<ConstraintId>(constraints_.size())));
  }
}

void Instance::setObjective(std::vector<ObjectiveTerm> objective) {
  for (const ObjectiveTerm& t : objective) growTo(t.lit.var());
  objective_ = std::move(objective);
}

}  // namespace pbhyb
