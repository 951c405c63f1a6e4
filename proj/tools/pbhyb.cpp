/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "pbhyb/bench.hpp"
#include "pbhyb/opb.hpp"
#include "pbhyb/solver.hpp"

namespace fs = std::filesystem;
using namespace pbhyb;

namespace {

constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;
constexpr int kExitOptimum = 30;

double defaultTimeout() {
  if (const char* env = std::getenv("PBHYB_TIMEOUT")) {
    try {
      return std::stod(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring unparsable PBHYB_TIMEOUT\n";
    }
  }
  return std::numeric_limits<double>::infinity();
}

struct SolveArgs {
  std::string file;
  std::string mode = "hybrid";
  std::string propCounting;  // decimal string, exact
  Coef propCutoff = -1;      // -1: keep mode default
  double timeout = defaultTimeout();
  uint64_t conflictLimit = std::numeric_limits<uint64_t>::max();
  bool noSaturation = false;
  bool maxGapInvert = false;
  bool noTiming = false;
  bool audit = false;
  bool quietModel = false;
  bool verbose = false;
};

int runSolve(const SolveArgs& args) {
  ParseOptions popts;
  popts.normalize.saturate = !args.noSaturation;
  OpbDocument doc = parseOpbFile(args.file, popts);
  for (const std::string& w : doc.warnings) std::cout << "c warning: " << w << "\n";

  HeuristicConfig cfg = parseModeLabel(args.mode);
  if (!args.propCounting.empty()) cfg.propCounting = Rational::fromDecimal(args.propCounting);
  if (args.propCutoff >= 0) cfg.cutoff = args.propCutoff;
  cfg.maxGapInvert = args.maxGapInvert;
  if (!cfg.valid()) throw std::invalid_argument("invalid heuristic parameters");

  SolverOptions sopts;
  sopts.audit = args.audit;
  sopts.normalize = popts.normalize;
  Budget budget;
  budget.timeLimitSec = args.timeout;
  budget.conflictLimit = args.conflictLimit;

  std::cout << "c instance " << args.file << " (" << sizeClassName(classify(doc.instance))
            << ", " << doc.instance.numVars() << " vars, " << doc.instance.constraints().size()
            << " constraints)\n";
  std::cout << "c prop-mode " << modeLabel(cfg) << "\n";

  Solver solver(doc.instance, cfg, sopts);
  solver.onImprove = [](Coef v) { std::cout << "o " << v << "\n" << std::flush; };
  SolveResult result =
      doc.instance.objective() ? solver.optimize(budget) : solver.solve(budget);

  int exitCode = 0;
  switch (result.status) {
    case Status::Sat:
      std::cout << "s SATISFIABLE\n";
      exitCode = kExitSat;
      break;
    case Status::Unsat:
      std::cout << "s UNSATISFIABLE\n";
      exitCode = kExitUnsat;
      break;
    case Status::Optimum:
      std::cout << "s OPTIMUM FOUND\n";
      exitCode = kExitOptimum;
      break;
    case Status::Timeout:
      std::cout << "s UNKNOWN\n";
      exitCode = 0;
      break;
  }
  if (result.model && !args.quietModel) {
    std::cout << "v";
    for (Var v = 1; v <= doc.instance.numVars(); ++v)
      std::cout << " " << ((*result.model)[v] ? "x" : "-x") << v;
    std::cout << "\n";
  }
  const SolverStats& st = result.stats;
  std::cout << "c stats conflicts=" << st.conflicts << " decisions=" << st.decisions
            << " propagations=" << st.propagations << " visits=" << st.prop.constraintVisits
            << " watch-replacements=" << st.prop.watchReplacements
            << " slack-updates=" << st.prop.slackUpdates << "\n";
  if (args.verbose) {
    const PropEngine& engine = solver.engine();
    int counting = 0;
    for (ConstraintId id = 0; id < engine.numConstraints(); ++id)
      if (engine.engineOf(id) == EngineKind::Counting) ++counting;
    std::cout << "c dispatch counting=" << counting
              << " watched=" << (engine.numConstraints() - counting)
              << " restarts=" << st.restarts << " learned=" << st.learnedClauses << "\n";
  }
  if (!args.noTiming) std::cout << "c wall-clock-seconds " << st.seconds << "\n";
  std::cout << std::flush;
  return exitCode;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pbhyb: a pseudo-boolean solver with pluggable unit propagation"};
  app.require_subcommand(1);

  SolveArgs solveArgs;
  CLI::App* solve = app.add_subcommand("solve", "solve one OPB instance");
  solve->add_option("file", solveArgs.file, "OPB instance")->required();
  solve->add_option("--prop-mode", solveArgs.mode,
                    "propagation dispatch: counting, watched, hybrid[:p], add[:c], abs[:c], "
                    "mul[:c], gap[:c], auto[:c]");
  solve->add_option("--prop-counting", solveArgs.propCounting,
                    "parameter p of the hybrid rule, exact decimal (default 0.7)");
  solve->add_option("--prop-cutoff", solveArgs.propCutoff,
                    "cut-off c of the newer heuristics (default 500)");
  solve->add_option("--timeout", solveArgs.timeout,
                    "wall-clock limit in seconds (default: PBHYB_TIMEOUT or none)");
  solve->add_option("--conflict-limit", solveArgs.conflictLimit, "stop after this many conflicts");
  solve->add_flag("--no-saturation", solveArgs.noSaturation,
                  "keep coefficients above the degree during normalization");
  solve->add_flag("--max-gap-invert", solveArgs.maxGapInvert,
                  "flip which branch of the max-gap predicate selects counting");
  solve->add_flag("--no-timing", solveArgs.noTiming, "suppress timing output lines");
  solve->add_flag("--audit", solveArgs.audit, "check engine invariants after every fixpoint");
  solve->add_flag("--no-model", solveArgs.quietModel, "suppress the v line");
  solve->add_flag("-v,--verbose", solveArgs.verbose, "extra c lines (dispatch tallies, restarts)");

  std::vector<std::string> classifyFiles;
  CLI::App* classifyCmd = app.add_subcommand("classify", "label instances small or large");
  classifyCmd->add_option("files", classifyFiles, "OPB instances")->required();

  KnapsackParams knapParams;
  int knapCount = 1;
  std::string knapOut;
  CLI::App* gen = app.add_subcommand("gen-knapsack", "generate knapsack OPB instances");
  gen->add_option("--items", knapParams.items, "number of items")->required();
  gen->add_option("--seed", knapParams.seed, "random seed")->required();
  gen->add_option("--wmin", knapParams.weightMin, "minimum weight");
  gen->add_option("--wmax", knapParams.weightMax, "maximum weight");
  gen->add_option("--count", knapCount, "number of instances (consecutive seeds)");
  gen->add_option("--out", knapOut, "output file (or directory when --count > 1)");

  std::string benchCorpus, benchModes, benchOut = "bench-out", benchJournal, benchSolver;
  double benchTimeout = 60.0;
  int benchParallel = 1;
  long benchMemMb = 2048;
  bool makeDeskCorpus = false;
  CLI::App* bench = app.add_subcommand("bench", "run the benchmark matrix");
  bench->add_option("--corpus", benchCorpus, "directory of .opb instances")->required();
  bench->add_option("--modes", benchModes,
                    "comma-separated mode labels (default: watched,counting,hybrid,"
                    "add:500,add:1000,abs:500,abs:1000)");
  bench->add_option("--timeout", benchTimeout, "per-run wall-clock timeout in seconds");
  bench->add_option("--parallel", benchParallel, "concurrent solver processes");
  bench->add_option("--mem-mb", benchMemMb, "per-process address-space cap in MiB");
  bench->add_option("--out", benchOut, "output directory for .dat files and summary");
  bench->add_option("--journal", benchJournal, "CSV journal path (default <out>/journal.csv)");
  bench->add_option("--solver", benchSolver, "solver binary (default: this executable)");
  bench->add_flag("--make-desk-corpus", makeDeskCorpus,
                  "populate an empty corpus directory with the desk-scale corpus "
                  "(30 knapsack + 20 random instances)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return runSolve(solveArgs);

    if (classifyCmd->parsed()) {
      int failures = 0;
      for (const std::string& file : classifyFiles) {
        try {
          OpbDocument doc = parseOpbFile(file);
          std::cout << file << ": " << sizeClassName(classify(doc.instance)) << "\n";
        } catch (const std::exception& e) {
          std::cout << file << ": error (" << e.what() << ")\n";
          ++failures;
        }
      }
      return failures == 0 ? 0 : 1;
    }

    if (gen->parsed()) {
      if (knapCount == 1) {
        Instance inst = genKnapsack(knapParams);
        if (knapOut.empty()) {
          writeOpb(inst, std::cout);
        } else {
          std::ofstream out(knapOut);
          if (!out) throw std::runtime_error("cannot write " + knapOut);
          writeOpb(inst, out);
        }
      } else {
        fs::path dir = knapOut.empty() ? fs::path(".") : fs::path(knapOut);
        fs::create_directories(dir);
        for (int i = 0; i < knapCount; ++i) {
          KnapsackParams p = knapParams;
          p.seed = knapParams.seed + static_cast<uint64_t>(i);
          char name[64];
          std::snprintf(name, sizeof name, "knap_s%llu_%03d.opb",
                        static_cast<unsigned long long>(knapParams.seed), i);
          std::ofstream out(dir / name);
          if (!out) throw std::runtime_error("cannot write into " + dir.string());
          writeOpb(genKnapsack(p), out);
        }
      }
      return 0;
    }

    if (bench->parsed()) {
      if (makeDeskCorpus &&
          (!fs::exists(benchCorpus) || fs::is_empty(fs::path(benchCorpus)))) {
        writeDeskCorpus(benchCorpus);
        std::cout << "c wrote desk corpus into " << benchCorpus << "\n";
      }
      RunMatrixOptions opts;
      std::string modeList = benchModes.empty()
                                 ? "watched,counting,hybrid,add:500,add:1000,abs:500,abs:1000"
                                 : benchModes;
      std::string cur;
      for (char c : modeList + ",") {
        if (c == ',') {
          if (!cur.empty()) {
            parseModeLabel(cur);  // validate before spawning anything
            opts.modes.push_back(cur);
          }
          cur.clear();
        } else {
          cur.push_back(c);
        }
      }
      opts.timeoutSec = benchTimeout;
      opts.parallelism = benchParallel;
      opts.memLimitMb = benchMemMb;
      opts.solverPath = benchSolver.empty() ? "/proc/self/exe" : benchSolver;
      fs::create_directories(benchOut);
      opts.journalPath =
          benchJournal.empty() ? (fs::path(benchOut) / "journal.csv").string() : benchJournal;

      std::vector<BenchRecord> records = runMatrix(benchCorpus, opts);
      emitCactus(records, benchOut);
      std::string summary = summaryTable(records);
      std::cout << summary;
      {
        std::ofstream out(fs::path(benchOut) / "summary.txt");
        out << summary;
      }
      std::string diag;
      if (!checkModeAgreement(records, &diag)) {
        std::cerr << "mode disagreement detected:\n" << diag;
        return 1;
      }
      return 0;
    }
  } catch (const OpbParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
