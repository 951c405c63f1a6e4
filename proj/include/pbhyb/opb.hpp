/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pbhyb/model.hpp"

namespace pbhyb {

/// Parse failure with the 1-based input line it occurred on.
class OpbParseError : public std::runtime_error {
 public:
  OpbParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct ParseOptions {
  NormalizeOptions normalize;
};

/// A parsed OPB file: the instance plus header bookkeeping. The competition
/// header comment `* #variable= N #constraint= M` is honored when present; a
/// constraint-count mismatch is recorded as a warning, not an error.
struct OpbDocument {
  std::optional<long long> declaredVars;
  std::optional<long long> declaredConstraints;
  Instance instance;
  std::vector<std::string> warnings;
};

OpbDocument parseOpb(std::istream& in, const ParseOptions& opts = {});
OpbDocument parseOpbString(const std::string& text, const ParseOptions& opts = {});
OpbDocument parseOpbFile(const std::string& path, const ParseOptions& opts = {});

/// Writes the stored (normalized, possibly saturated) form, one constraint
/// per line, negated literals as `~xN`. parse(write(I)) is semantically
/// identical to I.
void writeOpb(const Instance& instance, std::ostream& out);
std::string writeOpbString(const Instance& instance);

/// Largest |raw coefficient| over the input constraints of a parsed
/// instance; the small/large classification keys on this value.
inline Coef maxInputCoefficient(const Instance& instance) { return instance.maxInputCoef(); }

}  // namespace pbhyb
