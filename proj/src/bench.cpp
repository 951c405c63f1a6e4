/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#include "pbhyb/bench.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "pbhyb/opb.hpp"

namespace pbhyb {

namespace fs = std::filesystem;

SizeClass classify(const Instance& instance) {
  return instance.maxInputCoef() < 100 ? SizeClass::Small : SizeClass::Large;
}

namespace {

Coef draw(std::mt19937_64& rng, Coef lo, Coef hi) {
  assert(hi >= lo);
  uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  return lo + static_cast<Coef>(rng() % span);
}

}  // namespace

Instance genKnapsack(const KnapsackParams& params) {
  if (params.items < 1 || params.weightMin < 1 || params.weightMax < params.weightMin)
    throw std::invalid_argument("invalid knapsack parameters");
  std::mt19937_64 rng(params.seed);
  std::vector<Coef> weights(params.items);
  std::vector<Coef> values(params.items);
  Wide total = 0;
  for (int i = 0; i < params.items; ++i) {
    weights[i] = draw(rng, params.weightMin, params.weightMax);
    // values track weights with a little noise, keeping instances non-trivial
    Coef jitter = std::max<Coef>(1, weights[i] / 5);
    values[i] = std::max<Coef>(1, weights[i] + draw(rng, -jitter, jitter));
    total += weights[i];
  }
  Coef capacity = static_cast<Coef>(total / 2);

  Instance instance(params.items);
  RawConstraint cap;
  for (int i = 0; i < params.items; ++i)
    cap.terms.push_back(RawTerm{weights[i], Lit::positive(i + 1)});
  cap.rhs = capacity;
  cap.rel = Relation::LessEq;
  instance.addRaw(cap);

  std::vector<ObjectiveTerm> objective;
  for (int i = 0; i < params.items; ++i)
    objective.push_back(ObjectiveTerm{-values[i], Lit::positive(i + 1)});
  instance.setObjective(std::move(objective));
  return instance;
}

Instance genRandomPb(const RandomPbParams& params) {
  if (params.maxVars < 1 || params.maxConstraints < 1 || params.coefMax < 1)
    throw std::invalid_argument("invalid random-instance parameters");
  std::mt19937_64 rng(params.seed);
  int numVars = params.maxVars == 1 ? 1 : 2 + static_cast<int>(rng() % (params.maxVars - 1));
  int numCons = 1 + static_cast<int>(rng() % params.maxConstraints);
  Instance instance(numVars);

  std::vector<Var> vars(numVars);
  for (int i = 0; i < numVars; ++i) vars[i] = i + 1;

  for (int ci = 0; ci < numCons; ++ci) {
    // Fisher-Yates prefix for a distinct variable subset
    for (int i = 0; i < numVars; ++i) {
      int j = i + static_cast<int>(rng() % (numVars - i));
      std::swap(vars[i], vars[j]);
    }
    int len = 1 + static_cast<int>(rng() % std::min(numVars, 8));
    RawConstraint raw;
    Wide magnitude = 0;
    for (int i = 0; i < len; ++i) {
      Coef coef = draw(rng, 1, params.coefMax);
      if (rng() & 1) coef = -coef;
      Lit lit = Lit::make(vars[i], rng() & 1);
      raw.terms.push_back(RawTerm{coef, lit});
      magnitude += coef < 0 ? -coef : coef;
    }
    raw.rhs = draw(rng, -static_cast<Coef>(magnitude), static_cast<Coef>(magnitude));
    switch (rng() % 3) {
      case 0: raw.rel = Relation::GreaterEq; break;
      case 1: raw.rel = Relation::LessEq; break;
      default: raw.rel = Relation::Equal; break;
    }
    instance.addRaw(raw);
  }

  if (params.withObjective) {
    std::vector<ObjectiveTerm> objective;
    for (Var v = 1; v <= numVars; ++v) {
      if (rng() % 3 == 0) continue;
      Coef coef = draw(rng, 1, params.coefMax);
      if (rng() & 1) coef = -coef;
      objective.push_back(ObjectiveTerm{coef, Lit::positive(v)});
    }
    instance.setObjective(std::move(objective));
  }
  return instance;
}

std::string benchCsvHeader() {
  return "instance,mode,status,seconds,conflicts,decisions,propagations,visits,"
         "watch_replacements,slack_updates,value";
}

std::string toCsv(const BenchRecord& r) {
  std::ostringstream out;
  char sec[32];
  std::snprintf(sec, sizeof sec, "%.3f", r.seconds);
  out << r.instance << ',' << r.mode << ',' << r.status << ',' << sec << ',' << r.conflicts
      << ',' << r.decisions << ',' << r.propagations << ',' << r.visits << ','
      << r.watchReplacements << ',' << r.slackUpdates << ',';
  if (r.value) out << *r.value;
  return out.str();
}

BenchRecord fromCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  if (fields.size() != 11) throw std::runtime_error("bad journal line: " + line);
  BenchRecord r;
  r.instance = fields[0];
  r.mode = fields[1];
  r.status = fields[2];
  r.seconds = std::stod(fields[3]);
  r.conflicts = std::stoull(fields[4]);
  r.decisions = std::stoull(fields[5]);
  r.propagations = std::stoull(fields[6]);
  r.visits = std::stoull(fields[7]);
  r.watchReplacements = std::stoull(fields[8]);
  r.slackUpdates = std::stoull(fields[9]);
  if (!fields[10].empty()) r.value = std::stoll(fields[10]);
  return r;
}

namespace {

struct ChildProc {
  pid_t pid = -1;
  int fd = -1;
  std::chrono::steady_clock::time_point start;
  std::string instance;
  std::string mode;
  std::string output;
  bool killed = false;
};

ChildProc spawn(const std::string& instancePath, const std::string& mode,
                const RunMatrixOptions& opts) {
  int fds[2];
  if (pipe(fds) != 0) throw std::runtime_error("pipe() failed");
  pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork() failed");
  if (pid == 0) {
    dup2(fds[1], STDOUT_FILENO);
    close(fds[0]);
    close(fds[1]);
    if (opts.memLimitMb > 0) {
      rlimit lim;
      lim.rlim_cur = lim.rlim_max = static_cast<rlim_t>(opts.memLimitMb) << 20;
      setrlimit(RLIMIT_AS, &lim);
    }
    // cooperative backstop well above the external deadline
    std::string timeout = std::to_string(opts.timeoutSec * 2 + 5);
    std::string solver = opts.solverPath.empty() ? "/proc/self/exe" : opts.solverPath;
    execl(solver.c_str(), solver.c_str(), "solve", instancePath.c_str(), "--prop-mode",
          mode.c_str(), "--timeout", timeout.c_str(), "--no-timing", (char*)nullptr);
    _exit(127);
  }
  close(fds[1]);
  fcntl(fds[0], F_SETFL, O_NONBLOCK);
  ChildProc child;
  child.pid = pid;
  child.fd = fds[0];
  child.start = std::chrono::steady_clock::now();
  child.instance = instancePath;
  child.mode = mode;
  return child;
}

void drain(ChildProc& child) {
  char buf[4096];
  while (true) {
    ssize_t n = read(child.fd, buf, sizeof buf);
    if (n > 0)
      child.output.append(buf, static_cast<size_t>(n));
    else
      break;
  }
}

BenchRecord finalize(ChildProc& child, double elapsed, int waitStatus,
                     const RunMatrixOptions& opts) {
  BenchRecord r;
  r.instance = child.instance;
  r.mode = child.mode;
  r.seconds = elapsed;

  if (child.killed) {
    r.status = "TIMEOUT";
    r.seconds = std::max(elapsed, opts.timeoutSec);
  } else if (WIFEXITED(waitStatus)) {
    switch (WEXITSTATUS(waitStatus)) {
      case 10: r.status = "SAT"; break;
      case 20: r.status = "UNSAT"; break;
      case 30: r.status = "OPTIMUM"; break;
      case 0: r.status = "TIMEOUT"; break;  // cooperative backstop fired
      default: r.status = "ERROR"; break;
    }
  } else {
    r.status = "ERROR";
  }

  // counters from the "c stats k=v ..." line; objective from the last o-line
  std::istringstream lines(child.output);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("o ", 0) == 0) {
      try {
        r.value = std::stoll(line.substr(2));
      } catch (const std::exception&) {
      }
    } else if (line.rfind("c stats ", 0) == 0) {
      std::istringstream kvs(line.substr(8));
      std::string kv;
      while (kvs >> kv) {
        size_t eq = kv.find('=');
        if (eq == std::string::npos) continue;
        std::string key = kv.substr(0, eq);
        uint64_t v = 0;
        try {
          v = std::stoull(kv.substr(eq + 1));
        } catch (const std::exception&) {
          continue;
        }
        if (key == "conflicts") r.conflicts = v;
        else if (key == "decisions") r.decisions = v;
        else if (key == "propagations") r.propagations = v;
        else if (key == "visits") r.visits = v;
        else if (key == "watch-replacements") r.watchReplacements = v;
        else if (key == "slack-updates") r.slackUpdates = v;
      }
    }
  }
  if (r.status != "OPTIMUM") r.value.reset();
  return r;
}

}  // namespace

BenchRecord runOne(const std::string& instancePath, const std::string& mode,
                   const RunMatrixOptions& opts) {
  ChildProc child = spawn(instancePath, mode, opts);
  int waitStatus = 0;
  while (true) {
    pollfd pfd{child.fd, POLLIN, 0};
    poll(&pfd, 1, 10);
    drain(child);
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                   child.start)
                         .count();
    if (!child.killed && elapsed >= opts.timeoutSec) {
      kill(child.pid, SIGKILL);
      child.killed = true;
    }
    pid_t done = waitpid(child.pid, &waitStatus, WNOHANG);
    if (done == child.pid) {
      drain(child);
      close(child.fd);
      return finalize(child, elapsed, waitStatus, opts);
    }
  }
}

std::vector<BenchRecord> runMatrix(const std::string& corpusDir, const RunMatrixOptions& opts) {
  std::vector<std::string> instances;
  for (const auto& entry : fs::directory_iterator(corpusDir))
    if (entry.is_regular_file() && entry.path().extension() == ".opb")
      instances.push_back(entry.path().string());
  std::sort(instances.begin(), instances.end());
  if (instances.empty()) throw std::runtime_error("no .opb instances in " + corpusDir);

  // resume: load completed pairs from the journal
  std::vector<BenchRecord> records;
  std::set<std::pair<std::string, std::string>> done;
  if (!opts.journalPath.empty() && fs::exists(opts.journalPath)) {
    std::ifstream in(opts.journalPath);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (first && line == benchCsvHeader()) {
        first = false;
        continue;
      }
      first = false;
      BenchRecord r = fromCsv(line);
      if (done.emplace(r.instance, r.mode).second) records.push_back(std::move(r));
    }
  }

  std::ofstream journal;
  if (!opts.journalPath.empty()) {
    bool fresh = !fs::exists(opts.journalPath) || fs::file_size(opts.journalPath) == 0;
    journal.open(opts.journalPath, std::ios::app);
    if (fresh) journal << benchCsvHeader() << "\n" << std::flush;
  }

  std::vector<std::pair<std::string, std::string>> tasks;
  for (const std::string& inst : instances)
    for (const std::string& mode : opts.modes)
      if (!done.count({inst, mode})) tasks.emplace_back(inst, mode);

  size_t next = 0;
  std::vector<ChildProc> active;
  int maxActive = std::max(1, opts.parallelism);

  auto reapInto = [&](ChildProc& child, int waitStatus, double elapsed) {
    drain(child);
    close(child.fd);
    BenchRecord r = finalize(child, elapsed, waitStatus, opts);
    if (journal.is_open()) journal << toCsv(r) << "\n" << std::flush;
    records.push_back(std::move(r));
  };

  while (next < tasks.size() || !active.empty()) {
    while (static_cast<int>(active.size()) < maxActive && next < tasks.size()) {
      active.push_back(spawn(tasks[next].first, tasks[next].second, opts));
      ++next;
    }
    std::vector<pollfd> pfds;
    for (ChildProc& c : active) pfds.push_back(pollfd{c.fd, POLLIN, 0});
    poll(pfds.data(), pfds.size(), 10);
    for (size_t i = 0; i < active.size();) {
      ChildProc& child = active[i];
      drain(child);
      double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                     child.start)
                           .count();
      if (!child.killed && elapsed >= opts.timeoutSec) {
        kill(child.pid, SIGKILL);
        child.killed = true;
      }
      int waitStatus = 0;
      pid_t donePid = waitpid(child.pid, &waitStatus, WNOHANG);
      if (donePid == child.pid) {
        reapInto(child, waitStatus, elapsed);
        active.erase(active.begin() + static_cast<long>(i));
      } else {
        ++i;
      }
    }
  }

  // keep only records belonging to the requested matrix
  std::set<std::string> wantModes(opts.modes.begin(), opts.modes.end());
  std::set<std::string> wantInstances(instances.begin(), instances.end());
  std::vector<BenchRecord> out;
  for (BenchRecord& r : records)
    if (wantModes.count(r.mode) && wantInstances.count(r.instance)) out.push_back(std::move(r));
  return out;
}

std::map<std::string, int> emitCactus(const std::vector<BenchRecord>& records,
                                      const std::string& outDir) {
  fs::create_directories(outDir);
  std::map<std::string, std::vector<double>> solvedTimes;
  for (const BenchRecord& r : records) {
    solvedTimes.try_emplace(r.mode);
    if (r.solved()) solvedTimes[r.mode].push_back(r.seconds);
  }
  std::map<std::string, int> counts;
  for (auto& [mode, times] : solvedTimes) {
    std::sort(times.begin(), times.end());
    std::string name = "runtime-" + mode;
    std::replace(name.begin(), name.end(), ':', '-');
    std::replace(name.begin(), name.end(), '/', '-');
    std::ofstream out(fs::path(outDir) / (name + ".dat"));
    for (size_t k = 0; k < times.size(); ++k) {
      char sec[32];
      std::snprintf(sec, sizeof sec, "%.6g", times[k]);
      out << (k + 1) << " " << sec << "\n";
    }
    counts[mode] = static_cast<int>(times.size());
  }
  return counts;
}

std::string summaryTable(const std::vector<BenchRecord>& records) {
  std::map<std::string, int> solved;
  std::map<std::string, int> total;
  for (const BenchRecord& r : records) {
    ++total[r.mode];
    if (r.solved()) ++solved[r.mode];
  }
  std::ostringstream out;
  for (const auto& [mode, n] : total)
    out << mode << " (" << solved[mode] << "/" << n << ")\n";
  return out.str();
}

bool checkModeAgreement(const std::vector<BenchRecord>& records, std::string* diagnostics) {
  struct Answer {
    std::string status;
    std::optional<Coef> value;
    std::string mode;
  };
  std::map<std::string, Answer> byInstance;
  bool ok = true;
  std::ostringstream diag;
  for (const BenchRecord& r : records) {
    if (!r.solved()) continue;
    auto it = byInstance.find(r.instance);
    if (it == byInstance.end()) {
      byInstance.emplace(r.instance, Answer{r.status, r.value, r.mode});
      continue;
    }
    if (it->second.status != r.status || it->second.value != r.value) {
      ok = false;
      diag << r.instance << ": " << it->second.mode << " says " << it->second.status;
      if (it->second.value) diag << "(" << *it->second.value << ")";
      diag << " but " << r.mode << " says " << r.status;
      if (r.value) diag << "(" << *r.value << ")";
      diag << "\n";
    }
  }
  if (diagnostics) *diagnostics = diag.str();
  return ok;
}

std::vector<std::string> writeDeskCorpus(const std::string& dir, int knapsackCount,
                                         int randomCount, uint64_t seed) {
  fs::create_directories(dir);
  std::vector<std::string> written;
  char name[64];
  for (int i = 0; i < knapsackCount; ++i) {
    KnapsackParams p;
    p.items = 12;
    p.weightMin = 1;
    p.weightMax = 10000;
    p.seed = seed + static_cast<uint64_t>(i);
    std::snprintf(name, sizeof name, "knap_%03d.opb", i);
    std::ofstream out(fs::path(dir) / name);
    writeOpb(genKnapsack(p), out);
    written.push_back(name);
  }
  for (int i = 0; i < randomCount; ++i) {
    RandomPbParams p;
    p.maxVars = 10;
    p.maxConstraints = 8;
    p.coefMax = (i % 2 == 0) ? 5 : 1000;
    p.withObjective = i % 2 == 1;
    p.seed = seed * 1000 + static_cast<uint64_t>(i);
    std::snprintf(name, sizeof name, "rand_%03d.opb", i);
    std::ofstream out(fs::path(dir) / name);
    writeOpb(genRandomPb(p), out);
    written.push_back(name);
  }
  return written;
}

}  // namespace pbhyb
