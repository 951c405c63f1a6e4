/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#include "pbhyb/opb.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace pbhyb {

namespace {

bool isSpace(char c) { return c == ' ' || c == '\t' || c == '\r'; }

struct LineLexer {
  const std::string& text;
  size_t pos = 0;
  int line;

  explicit LineLexer(const std::string& t, int ln) : text(t), line(ln) {}

  void skipSpace() {
    while (pos < text.size() && isSpace(text[pos])) ++pos;
  }
  bool atEnd() {
    skipSpace();
    return pos >= text.size();
  }
  char peek() {
    skipSpace();
    return pos < text.size() ? text[pos] : '\0';
  }
  [[noreturn]] void fail(const std::string& msg) { throw OpbParseError(line, msg); }

  Coef parseCoef() {
    skipSpace();
    size_t start = pos;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-'))
      negative = text[pos++] == '-';
    size_t digitsStart = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == digitsStart) fail("expected a coefficient at '" + text.substr(start, 8) + "'");
    Coef value = 0;
    auto [p, ec] = std::from_chars(text.data() + digitsStart, text.data() + pos, value);
    if (ec != std::errc() || p != text.data() + pos)
      fail("coefficient out of range: " + text.substr(start, pos - start));
    return negative ? -value : value;
  }

  Lit parseLit(long long declaredVars) {
    skipSpace();
    bool negated = false;
    if (pos < text.size() && text[pos] == '~') {
      negated = true;
      ++pos;
      skipSpace();
    }
    if (pos >= text.size() || text[pos] != 'x') fail("expected a variable like x3");
    ++pos;
    size_t digitsStart = pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    if (pos == digitsStart) fail("expected a variable index after 'x'");
    long long idx = 0;
    auto [p, ec] = std::from_chars(text.data() + digitsStart, text.data() + pos, idx);
    if (ec != std::errc()) fail("variable index out of range");
    (void)p;
    if (idx < 1) fail("variable index must be >= 1");
    if (declaredVars > 0 && idx > declaredVars)
      fail("variable x" + std::to_string(idx) + " exceeds declared #variable= " +
           std::to_string(declaredVars));
    if (idx > std::numeric_limits<Var>::max()) fail("variable index out of range");
    return Lit::make(static_cast<Var>(idx), negated);
  }

  // A term is `coef literal`; a second literal before the next sign means a
  // non-linear product, which this parser rejects.
  bool tryParseRelation(Relation* rel) {
    skipSpace();
    if (pos >= text.size()) return false;
    if (text.compare(pos, 2, ">=") == 0) {
      *rel = Relation::GreaterEq;
      pos += 2;
      return true;
    }
    if (text.compare(pos, 2, "<=") == 0) {
      *rel = Relation::LessEq;
      pos += 2;
      return true;
    }
    if (text[pos] == '=') {
      *rel = Relation::Equal;
      pos += 1;
      return true;
    }
    if (text[pos] == '>' || text[pos] == '<') fail("unknown relation, expected >=, <= or =");
    return false;
  }

  bool trySemicolon() {
    skipSpace();
    if (pos < text.size() && text[pos] == ';') {
      ++pos;
      return true;
    }
    return false;
  }
};

std::vector<RawTerm> parseTermList(LineLexer& lex, long long declaredVars) {
  std::vector<RawTerm> terms;
  while (true) {
    char c = lex.peek();
    if (c == '\0' || c == ';' || c == '>' || c == '<' || c == '=') break;
    if (c == 'x' || c == '~') {
      if (terms.empty()) lex.fail("missing coefficient before variable");
      lex.fail("non-linear product term; only the linear OPB format is supported");
    }
    Coef coef = lex.parseCoef();
    if (coef == 0) lex.fail("zero coefficient");
    Lit lit = lex.parseLit(declaredVars);
    // a second bare literal right after completes a product
    char next = lex.peek();
    if (next == 'x' || next == '~')
      lex.fail("non-linear product term; only the linear OPB format is supported");
    terms.push_back(RawTerm{coef, lit});
  }
  return terms;
}

}  // namespace

OpbDocument parseOpb(std::istream& in, const ParseOptions& opts) {
  OpbDocument doc;
  std::string line;
  int lineNo = 0;
  long long constraintLines = 0;
  bool sawObjective = false;

  while (std::getline(in, line)) {
    ++lineNo;
    size_t first = 0;
    while (first < line.size() && isSpace(line[first])) ++first;
    if (first >= line.size()) continue;

    if (line[first] == '*') {
      // header comment: * #variable= N #constraint= M
      size_t vpos = line.find("#variable=");
      size_t cpos = line.find("#constraint=");
      if (vpos != std::string::npos && cpos != std::string::npos && lineNo == 1) {
        try {
          doc.declaredVars = std::stoll(line.substr(vpos + 10));
          doc.declaredConstraints = std::stoll(line.substr(cpos + 12));
        } catch (const std::exception&) {
          throw OpbParseError(lineNo, "malformed #variable=/#constraint= header");
        }
        if (*doc.declaredVars < 0 || *doc.declaredConstraints < 0)
          throw OpbParseError(lineNo, "negative counts in header");
        if (*doc.declaredVars > 100000000)
          throw OpbParseError(lineNo, "declared variable count is out of range");
        doc.instance.growTo(static_cast<int>(*doc.declaredVars));
      }
      continue;
    }

    LineLexer lex(line, lineNo);
    long long declared = doc.declaredVars.value_or(0);

    if (line.compare(first, 4, "min:") == 0) {
      if (sawObjective) lex.fail("duplicate objective line");
      sawObjective = true;
      lex.pos = first + 4;
      std::vector<RawTerm> terms = parseTermList(lex, declared);
      if (!lex.trySemicolon()) lex.fail("objective line must end with ';'");
      if (!lex.atEnd()) lex.fail("trailing characters after ';'");
      std::vector<ObjectiveTerm> obj;
      obj.reserve(terms.size());
      for (const RawTerm& t : terms) obj.push_back(ObjectiveTerm{t.coef, t.lit});
      doc.instance.setObjective(std::move(obj));
      continue;
    }
    if (line.compare(first, 4, "max:") == 0)
      lex.fail("only 'min:' objectives are supported");

    lex.pos = first;
    std::vector<RawTerm> terms = parseTermList(lex, declared);
    Relation rel;
    if (!lex.tryParseRelation(&rel)) lex.fail("expected a relation (>=, <= or =)");
    Coef rhs = lex.parseCoef();
    if (!lex.trySemicolon()) lex.fail("constraint must end with ';'");
    if (!lex.atEnd()) lex.fail("trailing characters after ';'");
    ++constraintLines;
    doc.instance.addRaw(RawConstraint{std::move(terms), rhs, rel}, opts.normalize);
  }

  if (doc.declaredConstraints && *doc.declaredConstraints != constraintLines) {
    doc.warnings.push_back("header declares " + std::to_string(*doc.declaredConstraints) +
                           " constraints but " + std::to_string(constraintLines) +
                           " were parsed");
  }
  return doc;
}

OpbDocument parseOpbString(const std::string& text, const ParseOptions& opts) {
  std::istringstream in(text);
  return parseOpb(in, opts);
}

OpbDocument parseOpbFile(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parseOpb(in, opts);
}

void writeOpb(const Instance& instance, std::ostream& out) {
  out << "* #variable= " << instance.numVars()
      << " #constraint= " << instance.constraints().size() << "\n";
  if (instance.objective()) {
    out << "min:";
    for (const ObjectiveTerm& t : *instance.objective()) {
      out << " " << (t.coef >= 0 ? "+" : "") << t.coef << " " << (t.lit.negated() ? "~x" : "x")
          << t.lit.var();
    }
    out << " ;\n";
  }
  for (const PBConstraint& c : instance.constraints()) {
    for (const Term& t : c.terms())
      out << "+" << t.coef << " " << (t.lit.negated() ? "~x" : "x") << t.lit.var() << " ";
    out << ">= " << c.degree() << " ;\n";
  }
}

std::string writeOpbString(const Instance& instance) {
  std::ostringstream out;
  writeOpb(instance, out);
  return out.str();
}

}  // namespace pbhyb
