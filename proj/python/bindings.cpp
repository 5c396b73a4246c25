#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tripssqp/analytic_suite.hpp"
#include "tripssqp/config.hpp"
#include "tripssqp/errors.hpp"
#include "tripssqp/harness.hpp"
#include "tripssqp/trace_io.hpp"

namespace py = pybind11;
using namespace tripssqp;

namespace {

Json parse_config(const std::string& text) {
  if (text.empty()) return Json::object();
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON config: ") + e.what());
  }
}

std::vector<std::string> problem_names() {
  std::vector<std::string> names;
  for (const ProblemInstance& p : make_analytic_suite(kAnalyticSuiteSize, 0)) names.push_back(p.name);
  return names;
}

py::dict problem_info(const std::string& name) {
  ProblemInstance p = analytic_problem(name);
  py::dict d;
  d["name"] = p.name;
  d["dim_x"] = p.dim_x;
  d["dim_eq"] = p.dim_eq;
  d["dim_ineq"] = p.dim_ineq;
  d["x0"] = p.x0;
  if (p.known_solution) d["known_solution"] = *p.known_solution;
  return d;
}

py::dict evaluate(const std::string& name, const Vector& x) {
  ProblemInstance p = analytic_problem(name);
  if (x.size() != p.dim_x) throw ConfigError("x has the wrong dimension");
  py::dict d;
  d["f"] = p.f(x);
  d["grad"] = p.grad_f(x);
  d["c"] = p.c(x);
  d["h"] = p.h(x);
  return d;
}

std::string solve_json(const std::string& problem_name, const std::string& config_text, std::uint64_t seed,
                       const std::string& algorithm) {
  Json doc = parse_config(config_text);
  check_keys(doc, {"solver", "oracle", "noise", "logistic"}, "config");
  SolverConfig solver = doc.contains("solver") ? solver_config_from_json(doc["solver"]) : SolverConfig{};
  OracleConfig oracle = doc.contains("oracle") ? oracle_config_from_json(doc["oracle"]) : OracleConfig{};
  LogisticProblemConfig logistic =
      doc.contains("logistic") ? logistic_config_from_json(doc["logistic"]) : LogisticProblemConfig{};
  NoiseModel noise;
  if (problem_name == "logistic") noise.kind = NoiseKind::subsample;
  if (doc.contains("noise")) noise = noise_model_from_json(doc["noise"], noise);
  solver.validate(oracle);
  MethodSpec method{parse_algorithm(algorithm), solver.hessian, std::nullopt};
  Json echo = {{"problem", problem_name}, {"algorithm", to_string(method.algorithm)}, {"seed", seed},
               {"solver", to_json(solver)}, {"oracle", to_json(oracle)},            {"noise", to_json(noise)}};
  RunTrace trace;
  {
    py::gil_scoped_release release;
    ProblemInstance problem =
        problem_name == "logistic" ? make_logistic_problem(logistic) : analytic_problem(problem_name);
    trace = run_method(problem, method, solver, oracle, noise, seed);
  }
  return trace_to_json(trace, echo).dump();
}

std::string bench_csv(const std::string& experiment, const std::string& config_text) {
  ExperimentConfig config = ExperimentConfig::defaults(parse_experiment_kind(experiment));
  config = experiment_config_from_json(parse_config(config_text), config);
  config.validate();
  ResultTable table;
  {
    py::gil_scoped_release release;
    table = run_experiment(config);
  }
  std::ostringstream out;
  write_results_csv(table, out);
  return out.str();
}

ResultTable table_from(const std::string& csv) {
  std::istringstream in(csv);
  return read_results_csv(in);
}

std::string profile_csv(const std::string& results_csv, std::vector<double> grid) {
  ResultTable table = table_from(results_csv);
  if (grid.empty()) grid = default_budget_grid(table);
  std::ostringstream out;
  write_profile_csv(performance_profile(table, grid), out);
  return out.str();
}

std::string summary_csv(const std::string& results_csv) {
  std::ostringstream out;
  write_boxes_csv(residual_summary(table_from(results_csv)), out);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_tripssqp, m) {
  m.doc() = "Trust-region interior-point stochastic SQP";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DatasetError>(m, "DatasetError", base.ptr());

  m.def("analytic_problem_names", &problem_names);
  m.def("problem_info", &problem_info, py::arg("name"));
  m.def("evaluate", &evaluate, py::arg("name"), py::arg("x"));
  m.def(
      "gradient_batch_size",
      [](double delta, int max_batch) {
        OracleConfig c;
        c.max_batch = max_batch;
        return gradient_batch_size(delta, c);
      },
      py::arg("delta"), py::arg("max_batch") = 10000);
  m.def(
      "value_batch_size",
      [](double delta, double eps_bar, int max_batch) {
        OracleConfig c;
        c.max_batch = max_batch;
        return value_batch_size(delta, eps_bar, c);
      },
      py::arg("delta"), py::arg("eps_bar"), py::arg("max_batch") = 10000);
  m.def(
      "kappa_f_bound",
      [](const std::string& solver_json) { return kappa_f_bound(solver_config_from_json(parse_config(solver_json))); },
      py::arg("solver_json") = "");
  m.def("quantile", [](std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, p);
  });
  m.def("_solve", &solve_json, py::arg("problem"), py::arg("config"), py::arg("seed"), py::arg("algorithm"));
  m.def("_bench", &bench_csv, py::arg("experiment"), py::arg("config"));
  m.def("_profile", &profile_csv, py::arg("results_csv"), py::arg("grid"));
  m.def("_summary", &summary_csv, py::arg("results_csv"));
}
