/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pbhyb/model.hpp"

namespace pbhyb {

enum class SizeClass { Small, Large };

/// Small iff every raw input-constraint coefficient is < 100 in magnitude.
/// Pure function of the raw coefficients; normalization settings are
/// irrelevant.
SizeClass classify(const Instance& instance);
inline const char* sizeClassName(SizeClass c) { return c == SizeClass::Small ? "small" : "large"; }

struct KnapsackParams {
  int items = 10;
  Coef weightMin = 1;
  Coef weightMax = 1000;
  uint64_t seed = 0;
};

/// Deterministic knapsack instance per seed: one capacity constraint
/// (sum w_i x_i <= floor(sum w / 2), normalized) and a maximization
/// objective of weight-correlated values, written as `min:` of their
/// negations.
Instance genKnapsack(const KnapsackParams& params);

struct RandomPbParams {
  int maxVars = 12;
  int maxConstraints = 10;
  Coef coefMax = 5;  // raw coefficients in [-coefMax, coefMax] \ {0}
  bool withObjective = false;
  uint64_t seed = 0;
};

/// Deterministic random pseudo-boolean instance: mixed relations, signed
/// coefficients, optional objective.
Instance genRandomPb(const RandomPbParams& params);

struct BenchRecord {
  std::string instance;  // path
  std::string mode;      // mode label
  std::string status;    // SAT / UNSAT / OPTIMUM / TIMEOUT / ERROR
  double seconds = 0.0;
  uint64_t conflicts = 0;
  uint64_t decisions = 0;
  uint64_t propagations = 0;
  uint64_t visits = 0;
  uint64_t watchReplacements = 0;
  uint64_t slackUpdates = 0;
  std::optional<Coef> value;  // objective value for OPTIMUM runs

  bool solved() const {
    return status == "SAT" || status == "UNSAT" || status == "OPTIMUM";
  }
};

std::string benchCsvHeader();
std::string toCsv(const BenchRecord& r);
BenchRecord fromCsv(const std::string& line);

struct RunMatrixOptions {
  std::vector<std::string> modes;
  double timeoutSec = 60.0;
  int parallelism = 1;
  long memLimitMb = 2048;
  std::string solverPath;   // solver binary; defaults to /proc/self/exe
  std::string journalPath;  // CSV journal, appended incrementally
};

/// Runs every (instance, mode) pair of the corpus directory in an isolated
/// child process with an external wall-clock timeout and a memory cap.
/// Completed pairs found in the journal are skipped, so interrupted runs
/// resume without duplicates. Solver crashes are recorded as ERROR.
std::vector<BenchRecord> runMatrix(const std::string& corpusDir, const RunMatrixOptions& opts);

/// Runs a single (instance, mode) pair in a child process.
BenchRecord runOne(const std::string& instancePath, const std::string& mode,
                   const RunMatrixOptions& opts);

/// Writes one cactus data file per mode: solved runs sorted by runtime,
/// lines "k seconds" for k = 1..solved. Returns mode -> solved count.
std::map<std::string, int> emitCactus(const std::vector<BenchRecord>& records,
                                      const std::string& outDir);

/// Per-mode legend lines with solved counts, e.g. "add:500 (23)".
std::string summaryTable(const std::vector<BenchRecord>& records);

/// Cross-mode agreement: every pair of modes must report the same status and
/// optimal value on instances both solved. Returns true when consistent;
/// otherwise fills `diagnostics`.
bool checkModeAgreement(const std::vector<BenchRecord>& records, std::string* diagnostics);

/// Materializes the desk-scale corpus: `knapsackCount` knapsack instances
/// (weights in [1, 10^4]) and `randomCount` random instances, half of them
/// optimization. Returns the written file names.
std::vector<std::string> writeDeskCorpus(const std::string& dir, int knapsackCount = 30,
                                         int randomCount = 20, uint64_t seed = 1);

}  // namespace pbhyb
