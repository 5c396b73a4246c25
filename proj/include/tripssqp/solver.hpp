#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tripssqp/hessian.hpp"
#include "tripssqp/kkt.hpp"
#include "tripssqp/merit.hpp"
#include "tripssqp/oracle.hpp"
#include "tripssqp/problem.hpp"
#include "tripssqp/step.hpp"

namespace tripssqp {

/// Prescribed barrier sequence θₖ: geometric qᵏ or power max{k,1}^{−p}.
struct BarrierSchedule {
  enum class Kind { geometric, power };
  Kind kind = Kind::geometric;
  double rate = 0.9999;

  static BarrierSchedule geometric(double q) { return {Kind::geometric, q}; }
  static BarrierSchedule power(double p) { return {Kind::power, p}; }
  /// "geom:0.9999" or "power:0.5".
  static BarrierSchedule parse(const std::string& text);

  double at(std::int64_t k) const;
  std::string to_string() const;
};

enum class BudgetKind { iterations, flops, gradient_evaluations, epochs };

std::string to_string(BudgetKind kind);
BudgetKind parse_budget_kind(const std::string& text);

struct Budget {
  BudgetKind kind = BudgetKind::iterations;
  double limit = std::numeric_limits<double>::infinity();
};

/// Reading of the fixed-sampling baseline's merit-parameter threshold.
///   decrease: Pred ≤ −‖Q̄‖min{Δ,ε_s} + ½‖W̄‖min{Δ²,ε_s²}
///   negated:  Pred ≤ −(‖Q̄‖min{Δ,ε_s} + ½‖W̄‖min{Δ²,ε_s²})
///   literal:  Pred ≤ ‖Q̄‖min{Δ,ε_s} + ½‖W̄‖min{Δ²,ε_s²}
enum class BaselineThreshold { decrease, negated, literal };

std::string to_string(BaselineThreshold mode);
BaselineThreshold parse_baseline_threshold(const std::string& text);

struct SolverConfig {
  double eta = 0.6;
  double zeta = 0.5;
  double eps_s = 0.9;
  double kappa_fcd = 1.0;
  double delta_max = 10.0;
  double rho = 1.5;
  double gamma = 1.5;
  double delta_0 = 1.0;
  double eps_bar_0 = 1.0;
  double mu_bar_0 = 1.0;
  double mu_cap = 1e10;
  double s_min = 1e-2;
  double tol_rel_kkt = 1e-4;
  std::int64_t max_iters = 100000;
  BarrierSchedule schedule;
  Budget budget;
  HessianKind hessian = HessianKind::identity;

  // Fixed-sampling baseline: Δ = β·min{ζ‖Q̄‖, δ}.
  double fs_zeta = 10.0;
  double fs_delta = 10.0;
  double fs_beta = 0.5;
  double fs_mu_0 = 1.0;
  double fs_rho = 1.5;
  int fs_batch = 1;
  BaselineThreshold fs_threshold = BaselineThreshold::decrease;

  StepParams step_params() const { return {zeta, eps_s, kappa_fcd}; }

  /// Range checks plus κ_f ≤ κ_fcd·ε_s·η³ / (16·max{1, Δ_max}). Throws ConfigError.
  void validate(const OracleConfig& oracle) const;
};

/// Upper bound allowed for κ_f by the other parameters.
double kappa_f_bound(const SolverConfig& config);

enum class RunStatus { running, converged, budget_exhausted, singular, merit_divergence, non_finite };

std::string to_string(RunStatus status);
RunStatus parse_run_status(const std::string& text);
/// True for the statuses that signal an aborted run.
bool is_failure(RunStatus status);

struct SolverState {
  Vector x;
  Vector s;
  double delta = 1.0;
  double eps_bar = 1.0;
  double mu_bar = 1.0;
  double theta = 1.0;
  std::int64_t k = 0;
  RunStatus status = RunStatus::running;
};

enum class StepClass { gate_fail, ratio_fail, reliable, unreliable, accepted };

std::string to_string(StepClass c);

/// One row of the run trace. Step diagnostics are NaN when no step was computed.
struct IterationRecord {
  std::int64_t k = 0;
  double theta = 0.0;
  double delta = 0.0;     // Δₖ used in this iteration
  double eps_bar = 0.0;   // ε̄ₖ used in this iteration
  double mu_bar = 0.0;    // μ̄ after the merit loop
  int batch_g = 0;
  int batch_f = 0;        // per point
  int batch_h = 0;
  double norm_q_bar = 0.0;
  double norm_q_true = 0.0;
  double rel_kkt = 0.0;   // at the iterate produced by this iteration
  StepClass classification = StepClass::gate_fail;
  double hessian_norm = 0.0;
  double w_norm = 0.0;
  double step_norm = std::numeric_limits<double>::quiet_NaN();
  double flops = 0.0;
  double charge = 0.0;    // budget consumed, in the configured budget unit

  double gamma_bar = std::numeric_limits<double>::quiet_NaN();
  double pred = std::numeric_limits<double>::quiet_NaN();
  double pred_threshold = std::numeric_limits<double>::quiet_NaN();
  int merit_turns = 0;
  double ared = std::numeric_limits<double>::quiet_NaN();
  double residual_norm = std::numeric_limits<double>::quiet_NaN();       // ‖ϑ‖
  double linearized_residual = std::numeric_limits<double>::quiet_NaN(); // ‖ϑ + Ad̃‖
  double tangential_decrease = std::numeric_limits<double>::quiet_NaN();
  double cauchy_decrease = std::numeric_limits<double>::quiet_NaN();
  double min_slack_ratio = std::numeric_limits<double>::quiet_NaN();     // min sₖ₊₁/sₖ when accepted
  bool used_cauchy = false;
};

struct RunTrace {
  std::string problem;
  std::string method;
  std::vector<IterationRecord> records;
  SolverState final_state;
  RunStatus status = RunStatus::running;
  std::string message;
  double ref_scale = 1.0;
  double initial_rel_kkt = 1.0;
  double final_rel_kkt = 1.0;
  std::int64_t gradient_samples = 0;
  std::int64_t value_samples = 0;
  std::int64_t hessian_samples = 0;
  double flops = 0.0;
  double budget_used = 0.0;
  BudgetKind budget_kind = BudgetKind::iterations;

  std::int64_t iterations() const { return static_cast<std::int64_t>(records.size()); }
};

/// State machine of one run. The problem must outlive the solver.
class Solver {
 public:
  Solver(const ProblemInstance& problem, NoiseModel noise, SolverConfig config, OracleConfig oracle);

  /// x = x₀, sᵢ = max{−hᵢ(x₀), s_min}, θ = θ₀, Δ = Δ₀, ε̄ = ε̄₀, μ̄ = μ̄₀.
  SolverState initialize() const;

  /// One adaptive-sampling iteration. Sets state.status on termination or
  /// failure. Requires state.status == running.
  IterationRecord iterate_once(SolverState& state);

  /// One fixed-sampling iteration (single-sample gradient, no value
  /// estimates, step always taken).
  IterationRecord iterate_fully_stochastic(SolverState& state);

  double ref_scale() const { return ref_scale_; }
  const SolverConfig& config() const { return config_; }

  /// Flop charge of one iteration under the accounting rule.
  static double iteration_flops(int d, int m, int n, HessianKind hessian, bool step_computed, int w_applies,
                                int projections);

 private:
  struct Context;
  Context prepare(const SolverState& state, int batch_g);
  void finish(SolverState& state, IterationRecord& rec);
  double charge_for(const IterationRecord& rec) const;
  double radius_for_baseline(double q_norm) const;
  double baseline_threshold(double q_norm, double w_norm, double delta) const;
  const Vector& true_gradient(const Vector& x);

  const ProblemInstance* problem_;
  NoiseModel noise_;
  SolverConfig config_;
  OracleConfig oracle_config_;
  Oracle oracle_;
  HessianModel hessian_model_;
  double ref_scale_ = 1.0;
  Vector grad_x_;
  Vector grad_;
};

/// Runs Algorithm TR-IP-SSQP until termination; `seed` keys the oracle draws.
RunTrace solve(const ProblemInstance& problem, NoiseModel noise, const SolverConfig& config,
               const OracleConfig& oracle, std::uint64_t seed);

/// Fixed-sampling counterpart (Fully-TR-IP-SSQP).
RunTrace solve_fully_stochastic(const ProblemInstance& problem, NoiseModel noise, const SolverConfig& config,
                                const OracleConfig& oracle, std::uint64_t seed);

}  // namespace tripssqp
