/***********************************************************************
Copyright (c) 2026 the pbhyb contributors

Distributed under the MIT license, see the LICENSE file.
***********************************************************************/

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pbhyb/bench.hpp"
#include "pbhyb/opb.hpp"
#include "pbhyb/solver.hpp"

namespace py = pybind11;
using namespace pbhyb;

namespace {

py::object wideToPy(Wide v) {
  // __int128 exceeds the native integer conversions; go through decimal text
  return py::module_::import("builtins").attr("int")(toString(v));
}

Relation relationFromString(const std::string& s) {
  if (s == ">=") return Relation::GreaterEq;
  if (s == "<=") return Relation::LessEq;
  if (s == "=") return Relation::Equal;
  throw std::invalid_argument("relation must be >=, <= or =");
}

HeuristicConfig configFrom(const std::string& mode, const std::string& p, Coef c) {
  HeuristicConfig cfg = parseModeLabel(mode);
  if (!p.empty()) cfg.propCounting = Rational::fromDecimal(p);
  if (c >= 0) cfg.cutoff = c;
  if (!cfg.valid()) throw std::invalid_argument("invalid heuristic parameters");
  return cfg;
}

py::dict resultToDict(const SolveResult& r, int numVars) {
  py::dict d;
  d["status"] = statusName(r.status);
  if (r.model) {
    py::list model;
    for (Var v = 1; v <= numVars; ++v) model.append(static_cast<bool>((*r.model)[v]));
    d["model"] = model;
  } else {
    d["model"] = py::none();
  }
  d["value"] = r.objectiveValue ? py::cast(*r.objectiveValue) : py::none();
  py::dict stats;
  stats["conflicts"] = r.stats.conflicts;
  stats["decisions"] = r.stats.decisions;
  stats["propagations"] = r.stats.propagations;
  stats["restarts"] = r.stats.restarts;
  stats["learned_clauses"] = r.stats.learnedClauses;
  stats["seconds"] = r.stats.seconds;
  stats["constraint_visits"] = r.stats.prop.constraintVisits;
  stats["watch_replacements"] = r.stats.prop.watchReplacements;
  stats["slack_updates"] = r.stats.prop.slackUpdates;
  d["stats"] = stats;
  return d;
}

SolveResult runWithConfig(const Instance& inst, const HeuristicConfig& cfg, double timeout,
                          uint64_t conflictLimit, bool audit) {
  Budget budget;
  if (timeout > 0) budget.timeLimitSec = timeout;
  if (conflictLimit > 0) budget.conflictLimit = conflictLimit;
  SolverOptions opts;
  opts.audit = audit;
  return runSolver(inst, cfg, budget, opts);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "pseudo-boolean solving with pluggable unit propagation";

  py::class_<Lit>(m, "Lit")
      .def(py::init([](int dimacs) { return Lit::fromDimacs(dimacs); }), py::arg("dimacs"),
           "build from a DIMACS-style signed index: 3 is x3, -3 its complement")
      .def_property_readonly("var", &Lit::var)
      .def_property_readonly("negated", &Lit::negated)
      .def("__invert__", [](Lit l) { return ~l; })
      .def("__eq__", [](Lit a, Lit b) { return a == b; })
      .def("__hash__", [](Lit l) { return l.index(); })
      .def("__repr__", [](Lit l) {
        return std::string(l.negated() ? "~x" : "x") + std::to_string(l.var());
      });

  py::class_<PBConstraint>(m, "PBConstraint")
      .def_property_readonly("degree", &PBConstraint::degree)
      .def_property_readonly("size", &PBConstraint::size)
      .def_property_readonly("terms",
                             [](const PBConstraint& c) {
                               py::list out;
                               for (const Term& t : c.terms())
                                 out.append(py::make_tuple(t.coef, t.lit));
                               return out;
                             })
      .def("__repr__", [](const PBConstraint& c) { return c.str(); });

  py::class_<Trail>(m, "Trail")
      .def(py::init<int>(), py::arg("num_vars"))
      .def("new_level", &Trail::newLevel)
      .def("assign",
           [](Trail& t, Lit l) { t.assign(l, std::nullopt); },
           py::arg("lit"))
      .def("pop", &Trail::pop)
      .def_property_readonly("level", &Trail::currentLevel)
      .def("value", [](const Trail& t, Var v) -> py::object {
        switch (t.value(v)) {
          case LBool::True: return py::bool_(true);
          case LBool::False: return py::bool_(false);
          default: return py::none();
        }
      });

  py::class_<Instance>(m, "Instance")
      .def(py::init<int>(), py::arg("num_vars") = 0)
      .def_property_readonly("num_vars", &Instance::numVars)
      .def_property_readonly("constraints", &Instance::constraints)
      .def_property_readonly("max_input_coef", &Instance::maxInputCoef)
      .def_property_readonly("trivially_false", &Instance::triviallyFalse)
      .def_property_readonly("objective",
                             [](const Instance& inst) -> py::object {
                               if (!inst.objective()) return py::none();
                               py::list out;
                               for (const ObjectiveTerm& t : *inst.objective())
                                 out.append(py::make_tuple(t.coef, t.lit));
                               return out;
                             })
      .def("add_constraint",
           [](Instance& inst, const std::vector<std::pair<Coef, Lit>>& terms, Coef rhs,
              const std::string& rel, bool saturate) {
             RawConstraint raw;
             for (const auto& [coef, lit] : terms) raw.terms.push_back(RawTerm{coef, lit});
             raw.rhs = rhs;
             raw.rel = relationFromString(rel);
             NormalizeOptions opts;
             opts.saturate = saturate;
             inst.addRaw(raw, opts);
           },
           py::arg("terms"), py::arg("rhs"), py::arg("rel") = ">=",
           py::arg("saturate") = true)
      .def("set_objective", [](Instance& inst, const std::vector<std::pair<Coef, Lit>>& terms) {
        std::vector<ObjectiveTerm> obj;
        for (const auto& [coef, lit] : terms) obj.push_back(ObjectiveTerm{coef, lit});
        inst.setObjective(std::move(obj));
      });

  m.def("normalize",
        [](const std::vector<std::pair<Coef, Lit>>& terms, Coef rhs, const std::string& rel,
           bool saturate) {
          RawConstraint raw;
          for (const auto& [coef, lit] : terms) raw.terms.push_back(RawTerm{coef, lit});
          raw.rhs = rhs;
          raw.rel = relationFromString(rel);
          NormalizeOptions opts;
          opts.saturate = saturate;
          NormalizeResult r = normalize(raw, opts);
          py::dict out;
          out["constraints"] = r.constraints;
          out["trivially_false"] = r.triviallyFalse;
          return out;
        },
        py::arg("terms"), py::arg("rhs"), py::arg("rel") = ">=", py::arg("saturate") = true,
        "rewrite a signed-coefficient constraint into >= normal form");

  m.def("slack",
        [](const PBConstraint& c, const Trail& t) { return wideToPy(slack(c, t)); },
        py::arg("constraint"), py::arg("trail"),
        "-degree plus the coefficients of non-falsified literals");

  m.def("unit_literals", &unitLiterals, py::arg("constraint"), py::arg("trail"),
        "unassigned literals whose coefficient exceeds the slack");

  m.def("parse_opb",
        [](const std::string& text, bool saturate) {
          ParseOptions opts;
          opts.normalize.saturate = saturate;
          return parseOpbString(text, opts).instance;
        },
        py::arg("text"), py::arg("saturate") = true, "parse OPB text into an instance");

  m.def("write_opb", [](const Instance& inst) { return writeOpbString(inst); },
        py::arg("instance"));

  m.def("dispatch_decision",
        [](const PBConstraint& c, const std::string& mode, const std::string& p, Coef cutoff,
           bool instanceIsSmall) {
          HeuristicConfig cfg = configFrom(mode, p, cutoff);
          DispatchDecision d = dispatch(c, cfg, instanceIsSmall);
          py::dict out;
          out["use_counting"] = d.useCounting;
          out["min_watches"] = d.minWatches ? py::cast(*d.minWatches) : py::none();
          return out;
        },
        py::arg("constraint"), py::arg("mode"), py::arg("p") = "", py::arg("c") = -1,
        py::arg("instance_is_small") = false,
        "which engine the configured heuristic picks for one constraint");

  m.def("solve",
        [](const Instance& inst, const std::string& mode, const std::string& p, Coef c,
           double timeout, uint64_t conflictLimit, bool audit) {
          SolveResult r =
              runWithConfig(inst, configFrom(mode, p, c), timeout, conflictLimit, audit);
          return resultToDict(r, inst.numVars());
        },
        py::arg("instance"), py::arg("mode") = "hybrid", py::arg("p") = "",
        py::arg("c") = -1, py::arg("timeout") = 0.0, py::arg("conflict_limit") = 0,
        py::arg("audit") = false,
        "solve or optimize (when the instance has an objective)");

  m.def("classify",
        [](const Instance& inst) { return std::string(sizeClassName(classify(inst))); },
        py::arg("instance"), "small (all raw coefficients < 100) or large");

  m.def("gen_knapsack",
        [](int items, Coef weightMin, Coef weightMax, uint64_t seed) {
          KnapsackParams params;
          params.items = items;
          params.weightMin = weightMin;
          params.weightMax = weightMax;
          params.seed = seed;
          return genKnapsack(params);
        },
        py::arg("items"), py::arg("weight_min") = 1, py::arg("weight_max") = 1000,
        py::arg("seed") = 0);

  m.def("gen_random_pb",
        [](int maxVars, int maxConstraints, Coef coefMax, bool withObjective, uint64_t seed) {
          RandomPbParams params;
          params.maxVars = maxVars;
          params.maxConstraints = maxConstraints;
          params.coefMax = coefMax;
          params.withObjective = withObjective;
          params.seed = seed;
          return genRandomPb(params);
        },
        py::arg("max_vars") = 12, py::arg("max_constraints") = 10, py::arg("coef_max") = 5,
        py::arg("with_objective") = false, py::arg("seed") = 0);

  m.attr("__version__") = "0.1.0";
}
