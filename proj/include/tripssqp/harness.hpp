#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tripssqp/config.hpp"
#include "tripssqp/logistic.hpp"
#include "tripssqp/solver.hpp"

namespace tripssqp {

enum class ExperimentKind { barrier_schedules, hessians_flops, adaptive_vs_fixed, logistic };

std::string to_string(ExperimentKind kind);
/// "exp1-barrier-schedules", "exp2-hessians-flops", "exp3-adaptive-vs-fixed", "logistic".
ExperimentKind parse_experiment_kind(const std::string& text);

enum class Algorithm { adaptive, fully_stochastic };

std::string to_string(Algorithm algorithm);
Algorithm parse_algorithm(const std::string& text);

struct MethodSpec {
  Algorithm algorithm = Algorithm::adaptive;
  HessianKind hessian = HessianKind::identity;
  std::optional<BarrierSchedule> schedule;  // overrides solver.barrier_schedule

  /// "TR-IP-SSQP-Id", "Fully-TR-IP-SSQP-EstH", with "@geom:0.999" appended
  /// when the method carries its own schedule.
  std::string id() const;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::barrier_schedules;
  std::vector<double> noise_levels;
  NoiseKind noise_kind = NoiseKind::gaussian;
  std::vector<MethodSpec> methods;
  int runs_per_instance = 5;
  std::uint64_t seed = 0;
  int threads = 1;  // 0 = hardware concurrency

  // Problem source: the analytic suite for experiments 1–3, generated or
  // loaded logistic instances for the logistic experiment.
  int suite_count = 10;
  std::uint64_t suite_seed = 0;
  LogisticProblemConfig logistic;
  int logistic_instances = 1;

  SolverConfig solver;
  OracleConfig oracle;

  /// Desk-scale defaults for each experiment.
  static ExperimentConfig defaults(ExperimentKind kind);

  /// Throws ConfigError.
  void validate() const;
};

/// Applies a config document {"solver", "oracle", "noise", "logistic",
/// "experiment"} on top of `base`. Unknown keys throw ConfigError.
ExperimentConfig experiment_config_from_json(const Json& j, ExperimentConfig base);
Json to_json(const ExperimentConfig& config);

struct ResultRow {
  std::string problem;
  int instance = 0;
  std::string method;
  double noise = 0.0;
  int run = 0;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::running;
  double final_rel_kkt = 0.0;
  std::int64_t iterations = 0;
  BudgetKind budget_kind = BudgetKind::iterations;
  double budget_used = 0.0;

  bool solved() const { return status == RunStatus::converged; }
  bool operator==(const ResultRow&) const = default;
};

struct ResultTable {
  std::vector<ResultRow> rows;

  std::size_t failed_runs() const;
  bool operator==(const ResultTable&) const = default;
};

inline constexpr const char* kResultsCsvHeader = "# tripssqp-results v1";
inline constexpr const char* kProfileCsvHeader = "# tripssqp-profile v1";
inline constexpr const char* kBoxesCsvHeader = "# tripssqp-boxes v1";

/// Seed of run r on instance i.
std::uint64_t run_seed(std::uint64_t master, int instance, int run);

/// Problems an experiment iterates over, in instance order.
std::vector<ProblemInstance> experiment_problems(const ExperimentConfig& config);

/// Rows are ordered by (instance, method, noise, run). Per-run solver
/// failures become status rows.
ResultTable run_experiment(const ExperimentConfig& config);

/// Same sweep on caller-provided problems.
ResultTable run_experiment(const ExperimentConfig& config, const std::vector<ProblemInstance>& problems);

/// Runs one method on one problem.
RunTrace run_method(const ProblemInstance& problem, const MethodSpec& method, const SolverConfig& solver,
                    const OracleConfig& oracle, NoiseModel noise, std::uint64_t seed);

void write_results_csv(const ResultTable& table, std::ostream& out);
/// Throws DatasetError on a missing version line, wrong columns or bad fields.
ResultTable read_results_csv(std::istream& in);

struct ProfileCurve {
  std::string method;
  double noise = 0.0;
  std::vector<double> budgets;
  std::vector<double> fraction;
};

/// Fraction of instances solved within each budget, per (method, noise): the
/// per-seed indicator [converged and budget_used ≤ B] averaged over runs and
/// instances. Curves follow first-appearance order of (method, noise).
std::vector<ProfileCurve> performance_profile(const ResultTable& table, const std::vector<double>& budgets);

/// `points` log-spaced budgets spanning the positive budget_used values of
/// the table (a single point when they coincide).
std::vector<double> default_budget_grid(const ResultTable& table, int points = 50);

void write_profile_csv(const std::vector<ProfileCurve>& curves, std::ostream& out);

struct BoxStats {
  std::string method;
  double noise = 0.0;
  std::size_t count = 0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

/// Linear-interpolation quantile of sorted data at probability p:
/// h = (n−1)p, q = x[⌊h⌋] + (h − ⌊h⌋)(x[⌊h⌋+1] − x[⌊h⌋]).
double quantile_sorted(const std::vector<double>& sorted, double p);

/// Box statistics of final_rel_kkt per (method, noise).
std::vector<BoxStats> residual_summary(const ResultTable& table);

void write_boxes_csv(const std::vector<BoxStats>& boxes, std::ostream& out);

}  // namespace tripssqp
