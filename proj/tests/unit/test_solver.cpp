#include <gtest/gtest.h>

#include <Eigen/SVD>
#include <cmath>
#include <cstring>

#include "support.hpp"
#include "tripssqp/analytic_suite.hpp"
#include "tripssqp/errors.hpp"
#include "tripssqp/kkt.hpp"
#include "tripssqp/logistic.hpp"
#include "tripssqp/merit.hpp"
#include "tripssqp/solver.hpp"

using namespace tripssqp;

namespace {

SolverConfig short_config(HessianKind hessian, BarrierSchedule schedule, std::int64_t iters) {
  SolverConfig cfg;
  cfg.hessian = hessian;
  cfg.schedule = schedule;
  cfg.max_iters = iters;
  return cfg;
}

OracleConfig capped_oracle(int max_batch) {
  OracleConfig o;
  o.max_batch = max_batch;
  return o;
}

// One scalar problem: min ½x² s.t. x ≤ 2. With θ = 1 the barrier problem is
// stationary at x = 1 − √2, s = 1 + √2.
ProblemInstance barrier_stationary_problem() {
  ProblemInstance p;
  p.name = "scalar_barrier";
  p.dim_x = 1;
  p.dim_ineq = 1;
  p.f = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  p.grad_f = [](const Vector& x) { return x; };
  p.hess_f = [](const Vector&) { return Matrix::Identity(1, 1); };
  p.c = [](const Vector&) { return Vector(0); };
  p.G = [](const Vector&) { return Matrix(0, 1); };
  p.h = [](const Vector& x) { return Vector::Constant(1, x[0] - 2.0); };
  p.J = [](const Vector&) { return Matrix::Ones(1, 1); };
  p.x0 = Vector::Constant(1, 1.0 - std::sqrt(2.0));
  return p;
}

struct RunCase {
  std::string problem;
  HessianKind hessian;
  BarrierSchedule schedule;
  double sigma2;
};

std::vector<RunCase> invariant_cases() {
  std::vector<RunCase> out;
  for (const auto& p : make_analytic_suite(kAnalyticSuiteSize, 0)) {
    out.push_back({p.name, HessianKind::identity, BarrierSchedule::geometric(0.9999), 0.0});
    out.push_back({p.name, HessianKind::sr1, BarrierSchedule::power(0.5), 1e-4});
    out.push_back({p.name, HessianKind::estimated, BarrierSchedule::geometric(0.999), 1e-2});
    out.push_back({p.name, HessianKind::averaged, BarrierSchedule::power(0.1), 1e-1});
  }
  return out;
}

double operator_norm(const Matrix& M) {
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

}  // namespace

TEST(BarrierSchedule, Values) {
  EXPECT_EQ(BarrierSchedule::geometric(0.9999).at(0), 1.0);
  EXPECT_EQ(BarrierSchedule::power(0.5).at(0), 1.0);
  EXPECT_EQ(BarrierSchedule::power(0.5).at(1), 1.0);
  EXPECT_DOUBLE_EQ(BarrierSchedule::power(0.5).at(4), 0.5);
  EXPECT_DOUBLE_EQ(BarrierSchedule::geometric(0.5).at(3), 0.125);
  auto s = BarrierSchedule::parse("power:0.1");
  EXPECT_EQ(s.kind, BarrierSchedule::Kind::power);
  EXPECT_EQ(s.rate, 0.1);
  EXPECT_EQ(BarrierSchedule::parse(s.to_string()).rate, 0.1);
  EXPECT_THROW(BarrierSchedule::parse("geom:1.5"), ConfigError);
  EXPECT_THROW(BarrierSchedule::parse("linear:0.5"), ConfigError);
  EXPECT_THROW(BarrierSchedule::parse("geom"), ConfigError);
  EXPECT_THROW(BarrierSchedule::parse("geom:abc"), ConfigError);
}

TEST(BarrierSchedule, NonIncreasing) {
  for (auto s : {BarrierSchedule::geometric(0.999), BarrierSchedule::power(0.1), BarrierSchedule::power(0.5)})
    for (int k = 0; k < 1000; ++k) EXPECT_LE(s.at(k + 1), s.at(k));
}

TEST(SolverConfig, DefaultKappaBound) {
  SolverConfig cfg;
  EXPECT_NEAR(kappa_f_bound(cfg), 0.001215, 1e-15);
  EXPECT_NO_THROW(cfg.validate(OracleConfig{}));
  OracleConfig o;
  o.kappa_f = 0.002;
  EXPECT_THROW(cfg.validate(o), ConfigError);
}

TEST(SolverConfig, RangeChecks) {
  OracleConfig o;
  auto expect_bad = [&](auto mutate) {
    SolverConfig cfg;
    mutate(cfg);
    EXPECT_THROW(cfg.validate(o), ConfigError);
  };
  expect_bad([](SolverConfig& c) { c.eta = 1.0; });
  expect_bad([](SolverConfig& c) { c.eps_s = 0.0; });
  expect_bad([](SolverConfig& c) { c.gamma = 1.0; });
  expect_bad([](SolverConfig& c) { c.rho = 0.9; });
  expect_bad([](SolverConfig& c) { c.delta_0 = 20.0; });
  expect_bad([](SolverConfig& c) { c.kappa_fcd = 1.5; });
  expect_bad([](SolverConfig& c) { c.max_iters = -1; });
  expect_bad([](SolverConfig& c) { c.fs_delta = 0.0; });
  expect_bad([](SolverConfig& c) { c.budget.limit = 0.0; });
}

TEST(SolverConfig, ParsesEnumerations) {
  EXPECT_EQ(parse_budget_kind("gradient-evaluations"), BudgetKind::gradient_evaluations);
  EXPECT_EQ(parse_budget_kind(to_string(BudgetKind::epochs)), BudgetKind::epochs);
  EXPECT_THROW(parse_budget_kind("seconds"), ConfigError);
  EXPECT_EQ(parse_baseline_threshold("literal"), BaselineThreshold::literal);
  EXPECT_THROW(parse_baseline_threshold("other"), ConfigError);
  for (auto s : {RunStatus::converged, RunStatus::budget_exhausted, RunStatus::merit_divergence}) {
    EXPECT_EQ(parse_run_status(to_string(s)), s);
  }
  EXPECT_EQ(to_string(RunStatus::budget_exhausted), "budget-exhausted");
  EXPECT_EQ(to_string(StepClass::gate_fail), "gate-fail-unsuccessful");
  EXPECT_EQ(to_string(StepClass::ratio_fail), "ratio-fail-unsuccessful");
  EXPECT_TRUE(is_failure(RunStatus::singular));
  EXPECT_FALSE(is_failure(RunStatus::budget_exhausted));
}

TEST(Solver, InitializeExamples) {
  ProblemInstance p = analytic_problem("hs35");
  p.dim_ineq = 2;
  p.h = [](const Vector&) { return (Vector(2) << -3.0, 0.5).finished(); };
  p.J = [](const Vector&) { return Matrix::Ones(2, 3); };
  SolverConfig cfg;
  Solver geom(p, {}, cfg, {});
  SolverState st = geom.initialize();
  EXPECT_EQ(st.s, (Vector(2) << 3.0, 0.01).finished());
  EXPECT_EQ(st.theta, 1.0);
  EXPECT_EQ(st.delta, cfg.delta_0);
  EXPECT_EQ(st.eps_bar, cfg.eps_bar_0);
  EXPECT_EQ(st.mu_bar, cfg.mu_bar_0);
  EXPECT_EQ(st.x, p.x0);
  cfg.schedule = BarrierSchedule::power(0.5);
  EXPECT_EQ(Solver(p, {}, cfg, {}).initialize().theta, 1.0);
}

TEST(Solver, RejectsUnsupportedCombinations) {
  ProblemInstance p = analytic_problem("hs35");
  SolverConfig cfg;
  cfg.budget = {BudgetKind::epochs, 10.0};
  EXPECT_THROW(Solver(p, {}, cfg, {}), ConfigError);
  ProblemInstance no_hessian = p;
  no_hessian.hess_f = nullptr;
  cfg = {};
  cfg.hessian = HessianKind::estimated;
  EXPECT_THROW(Solver(no_hessian, {}, cfg, {}), ConfigError);
}

TEST(Solver, GateFailsAtBarrierStationaryPoint) {
  ProblemInstance p = barrier_stationary_problem();
  SolverConfig cfg;
  cfg.schedule = BarrierSchedule::geometric(1.0);
  Solver solver(p, {}, cfg, {});
  SolverState st = solver.initialize();
  ASSERT_NEAR(st.s[0], 1.0 + std::sqrt(2.0), 1e-15);
  IterationRecord rec = solver.iterate_once(st);
  EXPECT_LT(rec.norm_q_bar, 1e-14);
  EXPECT_EQ(rec.classification, StepClass::gate_fail);
  EXPECT_DOUBLE_EQ(st.delta, 1.0 / 1.5);
  EXPECT_DOUBLE_EQ(st.eps_bar, 1.0 / 1.5);
  EXPECT_EQ(st.x, p.x0);
  EXPECT_EQ(st.k, 1);
  EXPECT_TRUE(std::isnan(rec.pred));
}

TEST(Solver, MaxItersZeroExhaustsImmediately) {
  SolverConfig cfg;
  cfg.max_iters = 0;
  RunTrace t = solve(analytic_problem("hs35"), {}, cfg, {}, 1);
  EXPECT_EQ(t.status, RunStatus::budget_exhausted);
  EXPECT_TRUE(t.records.empty());
  EXPECT_EQ(t.budget_used, 0.0);
}

TEST(Solver, IdenticalSeedsGiveIdenticalTraces) {
  ProblemInstance p = analytic_problem("quad_plane_cap");
  SolverConfig cfg = short_config(HessianKind::averaged, BarrierSchedule::geometric(0.999), 300);
  NoiseModel noise{1e-2, NoiseKind::gaussian, 0};
  RunTrace a = solve(p, noise, cfg, capped_oracle(1000), 77);
  RunTrace b = solve(p, noise, cfg, capped_oracle(1000), 77);
  RunTrace c = solve(p, noise, cfg, capped_oracle(1000), 78);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].rel_kkt, b.records[i].rel_kkt);
    EXPECT_EQ(std::memcmp(&a.records[i].ared, &b.records[i].ared, sizeof(double)), 0) << i;
  }
  EXPECT_EQ(a.final_state.x, b.final_state.x);
  EXPECT_NE(a.final_state.x, c.final_state.x);
}

class SolverInvariants : public ::testing::TestWithParam<int> {};

TEST_P(SolverInvariants, HoldOnEveryIteration) {
  const RunCase rc = invariant_cases()[GetParam()];
  ProblemInstance p = analytic_problem(rc.problem);
  SolverConfig cfg = short_config(rc.hessian, rc.schedule, 400);
  OracleConfig oracle = capped_oracle(1000);
  NoiseModel noise{rc.sigma2, NoiseKind::gaussian, 0};
  Solver solver(p, {rc.sigma2, NoiseKind::gaussian, 31}, cfg, oracle);
  SolverState st = solver.initialize();
  const double gamma = cfg.gamma;
  int steps = 0;
  while (st.status == RunStatus::running && st.k < cfg.max_iters) {
    SolverState before = st;
    IterationRecord rec;
    try {
      rec = solver.iterate_once(st);
    } catch (const MeritDivergenceError&) {
      break;
    }
    ++steps;
    EXPECT_EQ(rec.delta, before.delta);
    EXPECT_EQ(rec.eps_bar, before.eps_bar);
    EXPECT_GE(st.mu_bar, before.mu_bar);
    EXPECT_LE(st.theta, before.theta);
    EXPECT_EQ(st.theta, cfg.schedule.at(before.k + 1));
    EXPECT_GE(rec.batch_g, 1);
    EXPECT_LE(rec.batch_g, oracle.max_batch);
    EXPECT_EQ(rec.batch_g, gradient_batch_size(before.delta, oracle));
    EXPECT_GT(st.s.minCoeff(), 0.0);

    // ∇f + Gᵀλ + Jᵀτ = (P_G  −P_G JᵀS⁻¹)·Pψ at the iterate.
    ConstraintBlock block = build_block(p, before.x, before.s);
    Multipliers mult = true_multipliers(p, before.x, before.s, before.theta);
    Vector lag = p.grad_f(before.x) + p.J(before.x).transpose() * mult.tau;
    if (p.dim_eq > 0) lag += p.G(before.x).transpose() * mult.lambda;
    Vector ppsi = block.project(barrier_gradient(p.grad_f(before.x), before.theta, p.dim_ineq));
    Matrix PG = p.dim_eq > 0 ? fixtures::dense_projector(p.G(before.x)) : Matrix::Identity(p.dim_x, p.dim_x);
    Matrix M(p.dim_x, p.dim_x + p.dim_ineq);
    M << PG, -PG * p.J(before.x).transpose() * before.s.cwiseInverse().asDiagonal();
    EXPECT_LE((lag - M * ppsi).norm(), 1e-8 * std::max(1.0, lag.norm())) << rc.problem << " k=" << before.k;
    EXPECT_LE(lag.norm(), (1.0 + operator_norm(M)) * ppsi.norm() * (1 + 1e-10) + 1e-12);

    switch (rec.classification) {
      case StepClass::gate_fail:
      case StepClass::ratio_fail:
        EXPECT_EQ(st.x, before.x);
        EXPECT_EQ(st.s, before.s);
        EXPECT_EQ(st.delta, before.delta / gamma);
        EXPECT_EQ(st.eps_bar, before.eps_bar / gamma);
        break;
      case StepClass::reliable:
        EXPECT_GE(-rec.pred, before.eps_bar);
        EXPECT_EQ(st.delta, std::min(gamma * before.delta, cfg.delta_max));
        EXPECT_EQ(st.eps_bar, gamma * before.eps_bar);
        break;
      case StepClass::unreliable:
        EXPECT_LT(-rec.pred, before.eps_bar);
        EXPECT_EQ(st.delta, std::min(gamma * before.delta, cfg.delta_max));
        EXPECT_EQ(st.eps_bar, before.eps_bar / gamma);
        break;
      case StepClass::accepted:
        ADD_FAILURE() << "baseline class in adaptive run";
    }
    if (rec.classification != StepClass::gate_fail) {
      EXPECT_GE(rec.norm_q_bar / std::max(1.0, rec.w_norm), cfg.eta * before.delta);
      EXPECT_LE(rec.step_norm, before.delta + 1e-12);
      EXPECT_LE(rec.pred, rec.pred_threshold);
      EXPECT_LT(rec.pred, 0.0);
      EXPECT_LE(rec.tangential_decrease, cfg.kappa_fcd * rec.cauchy_decrease);
      EXPECT_LE(std::abs(rec.linearized_residual - (1.0 - rec.gamma_bar) * rec.residual_norm),
                1e-9 * std::max(1.0, rec.residual_norm));
      EXPECT_EQ(rec.pred_threshold,
                merit_threshold(rec.norm_q_bar, rec.w_norm, before.delta, cfg.eps_s, cfg.kappa_fcd));
    }
    if (rec.classification == StepClass::reliable || rec.classification == StepClass::unreliable) {
      EXPECT_LE(rec.ared, cfg.eta * rec.pred);
      for (int i = 0; i < p.dim_ineq; ++i) EXPECT_GE(st.s[i], (1.0 - cfg.eps_s) * before.s[i] * (1 - 1e-15));
      EXPECT_GE(rec.min_slack_ratio, 1.0 - cfg.eps_s - 1e-15);
    }
    if (rec.classification == StepClass::ratio_fail) EXPECT_GT(rec.ared, cfg.eta * rec.pred);
  }
  EXPECT_GT(steps, 0);
}

INSTANTIATE_TEST_SUITE_P(Runs, SolverInvariants, ::testing::Range(0, 4 * kAnalyticSuiteSize));

TEST(Solver, BudgetTotalsEqualSummedCharges) {
  ProblemInstance p = analytic_problem("two_active_curved");
  for (auto kind : {BudgetKind::iterations, BudgetKind::flops, BudgetKind::gradient_evaluations}) {
    SolverConfig cfg = short_config(HessianKind::sr1, BarrierSchedule::geometric(0.999), 100000);
    cfg.budget = {kind, kind == BudgetKind::flops ? 2e5 : kind == BudgetKind::iterations ? 250.0 : 5e4};
    RunTrace t = solve(p, {1e-2, NoiseKind::gaussian, 0}, cfg, capped_oracle(1000), 3);
    double sum = 0.0, flops = 0.0;
    std::int64_t grads = 0;
    for (const auto& r : t.records) {
      sum += r.charge;
      flops += r.flops;
      grads += r.batch_g;
    }
    EXPECT_EQ(t.budget_used, sum);
    EXPECT_EQ(t.flops, flops);
    EXPECT_EQ(t.gradient_samples, grads);
    if (t.status == RunStatus::budget_exhausted) {
      EXPECT_GE(t.budget_used, cfg.budget.limit);
      EXPECT_LT(t.budget_used - t.records.back().charge, cfg.budget.limit);
    }
    if (kind == BudgetKind::iterations) EXPECT_EQ(t.budget_used, static_cast<double>(t.records.size()));
  }
}

TEST(Solver, FlopRule) {
  // d = 2, m = 1, n = 1: per projection 2·2·3 + 2·4 = 20; factorization 4·3 + 8/3.
  double gate = Solver::iteration_flops(2, 1, 1, HessianKind::identity, false, 0, 0);
  EXPECT_DOUBLE_EQ(gate, 2.0 + 12.0 + 8.0 / 3.0 + 20.0);
  double est = Solver::iteration_flops(2, 1, 1, HessianKind::estimated, false, 0, 0);
  EXPECT_DOUBLE_EQ(est - gate, 2.0);
  double step = Solver::iteration_flops(2, 1, 1, HessianKind::identity, true, 3, 5);
  EXPECT_DOUBLE_EQ(step - gate, 20.0 + 4.0 + 6.0 + 3 * 4.0 + 5 * 20.0);
}

TEST(Solver, EpochChargesCountAllSamples) {
  LogisticProblemConfig lc;
  lc.d = 8;
  lc.N = 200;
  lc.seed = 1;
  ProblemInstance p = make_logistic_problem(lc);
  SolverConfig cfg = short_config(HessianKind::estimated, BarrierSchedule::geometric(0.999), 50);
  cfg.budget = {BudgetKind::epochs, 1e9};
  RunTrace t = solve(p, {0.0, NoiseKind::subsample, 0}, cfg, capped_oracle(100), 2);
  ASSERT_FALSE(t.records.empty());
  for (const auto& r : t.records)
    EXPECT_DOUBLE_EQ(r.charge, (r.batch_g + 2.0 * r.batch_f + r.batch_h) / 200.0);
}

TEST(FullyStochastic, OneSampleAndAlwaysMoves) {
  for (const auto& p : make_analytic_suite(kAnalyticSuiteSize, 0)) {
    SolverConfig cfg = short_config(HessianKind::identity, BarrierSchedule::geometric(0.999), 200);
    Solver solver(p, {1e-2, NoiseKind::gaussian, 4}, cfg, {});
    SolverState st = solver.initialize();
    while (st.status == RunStatus::running && st.k < cfg.max_iters) {
      SolverState before = st;
      IterationRecord rec;
      try {
        rec = solver.iterate_fully_stochastic(st);
      } catch (const MeritDivergenceError&) {
        break;
      }
      EXPECT_EQ(rec.batch_g, 1);
      EXPECT_EQ(rec.batch_f, 0);
      EXPECT_EQ(rec.classification, StepClass::accepted);
      EXPECT_LE(rec.pred, rec.pred_threshold);
      EXPECT_LE(rec.step_norm, rec.delta + 1e-12);
      if (rec.step_norm > 0.0) EXPECT_TRUE(st.x != before.x || st.s != before.s) << p.name;
      EXPECT_GE(st.mu_bar, before.mu_bar);
      EXPECT_GT(st.s.minCoeff(), 0.0);
    }
  }
}

TEST(FullyStochastic, RadiusFollowsStationarityMeasure) {
  ProblemInstance p = analytic_problem("hs35");
  SolverConfig cfg = short_config(HessianKind::identity, BarrierSchedule::geometric(0.999), 300);
  Solver solver(p, {1e-4, NoiseKind::gaussian, 1}, cfg, {});
  SolverState st = solver.initialize();
  for (int i = 0; i < 300 && st.status == RunStatus::running; ++i) {
    IterationRecord rec = solver.iterate_fully_stochastic(st);
    const double q = rec.norm_q_bar;
    const double expected = q < 1.0 ? 0.5 * 10.0 * q : 0.5 * 10.0;
    EXPECT_DOUBLE_EQ(rec.delta, expected);
    EXPECT_LE(rec.delta, cfg.fs_beta * cfg.fs_delta);
  }
}

TEST(FullyStochastic, ThresholdReadings) {
  ProblemInstance p = analytic_problem("hs35");
  for (auto mode : {BaselineThreshold::decrease, BaselineThreshold::negated, BaselineThreshold::literal}) {
    SolverConfig cfg = short_config(HessianKind::identity, BarrierSchedule::geometric(0.999), 1);
    cfg.fs_threshold = mode;
    Solver solver(p, {}, cfg, {});
    SolverState st = solver.initialize();
    IterationRecord rec = solver.iterate_fully_stochastic(st);
    double lin = rec.norm_q_bar * std::min(rec.delta, cfg.eps_s);
    double quad = 0.5 * rec.w_norm * std::min(rec.delta * rec.delta, cfg.eps_s * cfg.eps_s);
    double expected = mode == BaselineThreshold::decrease ? -lin + quad
                      : mode == BaselineThreshold::negated ? -(lin + quad)
                                                           : lin + quad;
    EXPECT_DOUBLE_EQ(rec.pred_threshold, expected);
  }
}

TEST(SolverRegression, ConvexQuadraticFiveHundredIterations) {
  SolverConfig cfg;
  cfg.max_iters = 500;
  RunTrace t = solve(analytic_problem("quad_upper_bounds"), {}, cfg, {}, 0);
  EXPECT_EQ(t.status, RunStatus::budget_exhausted);
  EXPECT_EQ(t.iterations(), 500);
  EXPECT_NEAR(t.final_rel_kkt, 0.38290086429800141, 1e-9);
}

TEST(SolverRegression, ZeroNoiseLogisticEstimatedHessian) {
  LogisticProblemConfig lc;
  lc.d = 15;
  lc.N = 6000;
  ProblemInstance p = make_logistic_problem(lc);
  SolverConfig cfg;
  cfg.hessian = HessianKind::estimated;
  cfg.budget = {BudgetKind::epochs, 200.0};
  cfg.max_iters = 10000000;
  RunTrace t = solve(p, {}, cfg, capped_oracle(1000), 0);
  EXPECT_EQ(t.status, RunStatus::budget_exhausted);
  EXPECT_EQ(t.iterations(), 614);
  EXPECT_NEAR(t.final_rel_kkt, 0.0011396415616463647, 1e-12);
}

TEST(SolverRegression, MeritParameterSettlesAtZeroNoise) {
  for (const auto& p : make_analytic_suite(kAnalyticSuiteSize, 0)) {
    SolverConfig cfg;
    cfg.max_iters = 10000;
    RunTrace t = solve(p, {}, cfg, {}, 0);
    ASSERT_FALSE(t.records.empty()) << p.name;
    const std::size_t half = t.records.size() / 2;
    for (std::size_t i = half; i < t.records.size(); ++i)
      ASSERT_EQ(t.records[i].mu_bar, t.records[half].mu_bar) << p.name << " k=" << i;
    double worst = 0.0;
    for (const auto& r : t.records)
      if (r.classification == StepClass::reliable || r.classification == StepClass::unreliable)
        worst = std::max(worst, std::abs(r.ared - r.pred) / (r.delta * r.delta));
    EXPECT_LT(worst, 100.0) << p.name;
  }
}

TEST(SolverRegression, InactiveConstraintsFloorTheResidual) {
  // Even at x* with slacks on the barrier path, τ = θ/s keeps min{−h, τ} > 0 on inactive constraints.
  const double theta = BarrierSchedule::geometric(0.9999).at(10000);
  ProblemInstance p = analytic_problem("quad_upper_bounds");
  const Vector& x = *p.known_solution;
  const Vector& tau = *p.known_ineq_multipliers;
  Vector s(p.dim_ineq);
  for (int i = 0; i < p.dim_ineq; ++i) s[i] = tau[i] > 0.0 ? theta / tau[i] : -p.h(x)[i];
  Solver solver(p, {}, SolverConfig{}, {});
  double rel = relative_kkt_residual(p, x, s, theta, solver.ref_scale());
  EXPECT_GT(rel, 1e-4);
}
