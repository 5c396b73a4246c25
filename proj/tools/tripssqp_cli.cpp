#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tripssqp/analytic_suite.hpp"
#include "tripssqp/config.hpp"
#include "tripssqp/errors.hpp"
#include "tripssqp/harness.hpp"
#include "tripssqp/logistic.hpp"
#include "tripssqp/trace_io.hpp"

namespace fs = std::filesystem;
using namespace tripssqp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDataset = 3;
constexpr int kExitFailedRuns = 4;

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

ResultTable load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open '" + path + "'");
  return read_results_csv(in);
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      grid.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw ConfigError("bad budget '" + item + "' in --grid");
    }
  }
  if (grid.empty() || !std::is_sorted(grid.begin(), grid.end())) throw ConfigError("--grid must be ascending");
  return grid;
}

int run_solve(const std::string& problem_name, const std::string& config_path, std::uint64_t seed,
              const std::string& out_path, const std::string& csv_path, const std::string& algorithm) {
  Json doc = config_path.empty() ? Json::object() : read_json_file(config_path);
  check_keys(doc, {"solver", "oracle", "noise", "logistic", "experiment"}, "config");
  SolverConfig solver = doc.contains("solver") ? solver_config_from_json(doc["solver"]) : SolverConfig{};
  OracleConfig oracle = doc.contains("oracle") ? oracle_config_from_json(doc["oracle"]) : OracleConfig{};
  LogisticProblemConfig logistic =
      doc.contains("logistic") ? logistic_config_from_json(doc["logistic"]) : LogisticProblemConfig{};
  NoiseModel noise;
  if (problem_name == "logistic") noise.kind = NoiseKind::subsample;
  if (doc.contains("noise")) noise = noise_model_from_json(doc["noise"], noise);
  solver.validate(oracle);

  ProblemInstance problem = problem_name == "logistic" ? make_logistic_problem(logistic) : analytic_problem(problem_name);
  MethodSpec method{parse_algorithm(algorithm), solver.hessian, std::nullopt};
  RunTrace trace = run_method(problem, method, solver, oracle, noise, seed);

  Json echo;
  echo["problem"] = problem_name;
  echo["algorithm"] = to_string(method.algorithm);
  echo["seed"] = seed;
  echo["solver"] = to_json(solver);
  echo["oracle"] = to_json(oracle);
  echo["noise"] = to_json(noise);
  if (problem_name == "logistic") echo["logistic"] = to_json(logistic);

  fs::path out(out_path);
  if (out.extension() == ".csv") {
    auto f = open_out(out);
    write_trace_csv(trace, f);
  } else {
    auto f = open_out(out);
    f << trace_to_json(trace, echo).dump(1) << '\n';
  }
  if (!csv_path.empty()) {
    auto f = open_out(csv_path);
    write_trace_csv(trace, f);
  }
  std::cout << problem.name << ' ' << trace.method << ' ' << to_string(trace.status) << " iterations "
            << trace.iterations() << " rel_kkt " << trace.final_rel_kkt << '\n';
  if (!trace.message.empty()) std::cerr << trace.message << '\n';
  return is_failure(trace.status) ? kExitFailedRuns : kExitOk;
}

int run_bench(const std::string& experiment, const std::string& config_path, const std::string& out_dir) {
  ExperimentConfig config = ExperimentConfig::defaults(parse_experiment_kind(experiment));
  if (!config_path.empty()) config = experiment_config_from_json(read_json_file(config_path), config);
  config.validate();
  ResultTable table = run_experiment(config);

  fs::path dir(out_dir);
  fs::create_directories(dir);
  {
    auto f = open_out(dir / "config.json");
    f << to_json(config).dump(2) << '\n';
  }
  {
    auto f = open_out(dir / "results.csv");
    write_results_csv(table, f);
  }
  {
    auto f = open_out(dir / "profile.csv");
    write_profile_csv(performance_profile(table, default_budget_grid(table)), f);
  }
  {
    auto f = open_out(dir / "boxes.csv");
    write_boxes_csv(residual_summary(table), f);
  }
  std::size_t failed = table.failed_runs();
  std::size_t solved = std::count_if(table.rows.begin(), table.rows.end(), [](const ResultRow& r) { return r.solved(); });
  std::cout << table.rows.size() << " runs, " << solved << " converged, " << failed << " failed\n";
  return failed > 0 ? kExitFailedRuns : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-region interior-point stochastic SQP solver and benchmark harness"};
  app.require_subcommand(1);

  std::string problem, config, out, csv, algorithm = "adaptive";
  std::uint64_t seed = 0;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one problem and write its trace");
  solve_cmd->add_option("--problem", problem, "Analytic suite problem name, or 'logistic'")->required();
  solve_cmd->add_option("--config", config, "JSON config file");
  solve_cmd->add_option("--seed", seed, "Noise seed");
  solve_cmd->add_option("--out", out, "Trace file (.json, or .csv for the per-iteration table)")->required();
  solve_cmd->add_option("--csv", csv, "Also write the per-iteration CSV trace here");
  solve_cmd->add_option("--algorithm", algorithm, "adaptive or fully-stochastic");

  std::string experiment, out_dir;
  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment sweep");
  bench_cmd->add_option("--experiment", experiment,
                        "exp1-barrier-schedules, exp2-hessians-flops, exp3-adaptive-vs-fixed or logistic")
      ->required();
  bench_cmd->add_option("--config", config, "JSON config file");
  bench_cmd->add_option("--out", out_dir, "Output directory")->required();

  std::string in, grid;
  int points = 50;
  auto* profile_cmd = app.add_subcommand("profile", "Performance profiles from a results table");
  profile_cmd->add_option("--in", in, "results.csv")->required();
  profile_cmd->add_option("--out", out, "profile.csv")->required();
  profile_cmd->add_option("--grid", grid, "Comma-separated ascending budgets");
  profile_cmd->add_option("--points", points, "Number of log-spaced budgets when --grid is absent");

  auto* summary_cmd = app.add_subcommand("summary", "Residual box statistics from a results table");
  summary_cmd->add_option("--in", in, "results.csv")->required();
  summary_cmd->add_option("--out", out, "boxes.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*solve_cmd) return run_solve(problem, config, seed, out, csv, algorithm);
    if (*bench_cmd) return run_bench(experiment, config, out_dir);
    if (*profile_cmd) {
      ResultTable table = load_results(in);
      std::vector<double> budgets = grid.empty() ? default_budget_grid(table, points) : parse_grid(grid);
      auto f = open_out(out);
      write_profile_csv(performance_profile(table, budgets), f);
      return kExitOk;
    }
    if (*summary_cmd) {
      ResultTable table = load_results(in);
      auto f = open_out(out);
      write_boxes_csv(residual_summary(table), f);
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DatasetError& e) {
    std::cerr << "dataset error: " << e.what() << '\n';
    return kExitDataset;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
