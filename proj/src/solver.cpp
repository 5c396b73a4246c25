#include "tripssqp/solver.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "tripssqp/errors.hpp"

namespace tripssqp {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

double parse_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    double value = std::stod(text, &used);
    if (used != text.size()) throw ConfigError("invalid number '" + text + "' in " + what);
    return value;
  } catch (const std::logic_error&) {
    throw ConfigError("invalid number '" + text + "' in " + what);
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

BarrierSchedule BarrierSchedule::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("barrier schedule must look like geom:q or power:p, got '" + text + "'");
  std::string kind = lower(text.substr(0, colon));
  double rate = parse_number(text.substr(colon + 1), "barrier schedule");
  BarrierSchedule out;
  if (kind == "geom" || kind == "geometric") {
    require(rate > 0.0 && rate < 1.0, "geometric barrier rate must lie in (0, 1)");
    out = geometric(rate);
  } else if (kind == "power") {
    require(rate > 0.0 && std::isfinite(rate), "power barrier exponent must be positive");
    out = power(rate);
  } else {
    throw ConfigError("unknown barrier schedule '" + kind + "'");
  }
  return out;
}

double BarrierSchedule::at(std::int64_t k) const {
  if (kind == Kind::geometric) return std::pow(rate, static_cast<double>(k));
  return std::pow(static_cast<double>(std::max<std::int64_t>(k, 1)), -rate);
}

std::string BarrierSchedule::to_string() const {
  std::ostringstream out;
  out << (kind == Kind::geometric ? "geom:" : "power:") << rate;
  return out.str();
}

std::string to_string(BudgetKind kind) {
  switch (kind) {
    case BudgetKind::iterations: return "iterations";
    case BudgetKind::flops: return "flops";
    case BudgetKind::gradient_evaluations: return "gradient_evaluations";
    case BudgetKind::epochs: return "epochs";
  }
  return "iterations";
}

BudgetKind parse_budget_kind(const std::string& text) {
  std::string t = lower(text);
  if (t == "iterations") return BudgetKind::iterations;
  if (t == "flops") return BudgetKind::flops;
  if (t == "gradient_evaluations" || t == "gradient-evaluations") return BudgetKind::gradient_evaluations;
  if (t == "epochs") return BudgetKind::epochs;
  throw ConfigError("unknown budget kind '" + text + "'");
}

std::string to_string(BaselineThreshold mode) {
  switch (mode) {
    case BaselineThreshold::decrease: return "decrease";
    case BaselineThreshold::negated: return "negated";
    case BaselineThreshold::literal: return "literal";
  }
  return "decrease";
}

BaselineThreshold parse_baseline_threshold(const std::string& text) {
  std::string t = lower(text);
  if (t == "decrease") return BaselineThreshold::decrease;
  if (t == "negated") return BaselineThreshold::negated;
  if (t == "literal") return BaselineThreshold::literal;
  throw ConfigError("unknown baseline threshold '" + text + "'");
}

double kappa_f_bound(const SolverConfig& c) {
  return c.kappa_fcd * c.eps_s * c.eta * c.eta * c.eta / (16.0 * std::max(1.0, c.delta_max));
}

void SolverConfig::validate(const OracleConfig& oracle) const {
  oracle.validate();
  require(eta > 0.0 && eta < 1.0, "eta must lie in (0, 1)");
  require(zeta > 0.0 && zeta <= 1.0, "zeta must lie in (0, 1]");
  require(eps_s > 0.0 && eps_s < 1.0, "eps_s must lie in (0, 1)");
  require(kappa_fcd > 0.0 && kappa_fcd <= 1.0, "kappa_fcd must lie in (0, 1]");
  require(delta_max > 0.0 && std::isfinite(delta_max), "delta_max must be positive");
  require(delta_0 > 0.0 && delta_0 <= delta_max, "delta_0 must lie in (0, delta_max]");
  require(rho > 1.0, "rho must exceed 1");
  require(gamma > 1.0, "gamma must exceed 1");
  require(eps_bar_0 > 0.0, "eps_bar_0 must be positive");
  require(mu_bar_0 > 0.0, "mu_bar_0 must be positive");
  require(mu_cap >= mu_bar_0, "mu_cap must be at least mu_bar_0");
  require(s_min > 0.0, "s_min must be positive");
  require(tol_rel_kkt >= 0.0, "tol_rel_kkt must be nonnegative");
  require(max_iters >= 0, "max_iters must be nonnegative");
  require(budget.limit > 0.0, "budget limit must be positive");
  require(fs_zeta > 0.0 && fs_delta > 0.0, "baseline zeta and delta must be positive");
  require(fs_beta > 0.0 && fs_beta <= 1.0, "baseline beta must lie in (0, 1]");
  require(fs_mu_0 > 0.0, "baseline mu_0 must be positive");
  require(fs_rho > 1.0, "baseline rho must exceed 1");
  require(fs_batch >= 1, "baseline batch must be at least 1");
  double bound = kappa_f_bound(*this);
  if (oracle.kappa_f > bound) {
    std::ostringstream msg;
    msg << "kappa_f = " << oracle.kappa_f << " exceeds its bound " << bound;
    throw ConfigError(msg.str());
  }
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::running: return "running";
    case RunStatus::converged: return "converged";
    case RunStatus::budget_exhausted: return "budget-exhausted";
    case RunStatus::singular: return "singular";
    case RunStatus::merit_divergence: return "merit-divergence";
    case RunStatus::non_finite: return "non-finite";
  }
  return "running";
}

RunStatus parse_run_status(const std::string& text) {
  for (RunStatus s : {RunStatus::running, RunStatus::converged, RunStatus::budget_exhausted, RunStatus::singular,
                      RunStatus::merit_divergence, RunStatus::non_finite}) {
    if (to_string(s) == text) return s;
  }
  throw DatasetError("unknown run status '" + text + "'");
}

bool is_failure(RunStatus status) {
  return status == RunStatus::singular || status == RunStatus::merit_divergence || status == RunStatus::non_finite;
}

std::string to_string(StepClass c) {
  switch (c) {
    case StepClass::gate_fail: return "gate-fail-unsuccessful";
    case StepClass::ratio_fail: return "ratio-fail-unsuccessful";
    case StepClass::reliable: return "reliable";
    case StepClass::unreliable: return "unreliable";
    case StepClass::accepted: return "accepted";
  }
  return "gate-fail-unsuccessful";
}

struct Solver::Context {
  Vector g_bar;
  Vector c, h;
  Matrix G, J;
  std::optional<ConstraintBlock> block;
  std::optional<BarrierHessian> W;
  Vector psi_bar;
  double q_norm = 0.0;
};

Solver::Solver(const ProblemInstance& problem, NoiseModel noise, SolverConfig config, OracleConfig oracle)
    : problem_(&problem),
      noise_(noise),
      config_(config),
      oracle_config_(oracle),
      oracle_(problem, noise),
      hessian_model_(config.hessian) {
  problem.validate();
  config_.validate(oracle_config_);
  if (config_.budget.kind == BudgetKind::epochs && !problem.finite_sum) {
    throw ConfigError("an epoch budget needs a finite-sum objective");
  }
  if ((config_.hessian == HessianKind::estimated || config_.hessian == HessianKind::averaged) &&
      !problem.has_hessian()) {
    throw ConfigError("Hessian model " + to_string(config_.hessian) + " needs objective Hessians");
  }
  SolverState s0 = initialize();
  ref_scale_ = kkt_reference_scale(problem, s0.x, s0.s, s0.theta);
}

SolverState Solver::initialize() const {
  SolverState st;
  st.x = problem_->x0;
  Vector h0 = problem_->h(st.x);
  st.s = (-h0).cwiseMax(config_.s_min);
  st.delta = config_.delta_0;
  st.eps_bar = config_.eps_bar_0;
  st.mu_bar = config_.mu_bar_0;
  st.theta = config_.schedule.at(0);
  st.k = 0;
  st.status = RunStatus::running;
  return st;
}

const Vector& Solver::true_gradient(const Vector& x) {
  if (grad_x_.size() != x.size() || grad_x_ != x) {
    grad_ = problem_->grad_f(x);
    grad_x_ = x;
  }
  return grad_;
}

double Solver::iteration_flops(int d, int m, int n, HessianKind hessian, bool step_computed, int w_applies,
                               int projections) {
  const double dd = d, mn = m + n, dn = d + n;
  double flops = hessian == HessianKind::identity ? dd : dd * dd;
  flops += mn * mn * dn + mn * mn * mn / 3.0;
  double per_projection = 2.0 * mn * dn + 2.0 * mn * mn;
  // Q̄ always needs one projection.
  flops += per_projection;
  if (step_computed) {
    // normal step, Pred (one W̄ product and one A product)
    flops += per_projection + dd * dd + mn * dn;
    flops += w_applies * dd * dd + projections * per_projection;
  }
  return flops;
}

double Solver::charge_for(const IterationRecord& rec) const {
  switch (config_.budget.kind) {
    case BudgetKind::iterations: return 1.0;
    case BudgetKind::flops: return rec.flops;
    case BudgetKind::gradient_evaluations: return rec.batch_g;
    case BudgetKind::epochs:
      return (static_cast<double>(rec.batch_g) + 2.0 * rec.batch_f + rec.batch_h) / problem_->finite_sum->size();
  }
  return 1.0;
}

Solver::Context Solver::prepare(const SolverState& state, int batch_g) {
  Context ctx;
  const auto k = static_cast<std::uint64_t>(state.k);
  ctx.g_bar = oracle_.gradient(state.x, batch_g, k).value;
  ctx.c = problem_->c(state.x);
  ctx.h = problem_->h(state.x);
  ctx.G = problem_->G(state.x);
  ctx.J = problem_->J(state.x);
  ctx.block.emplace(ctx.G, ctx.J, ctx.c, ctx.h, state.s);
  HessianInputs in;
  in.problem = problem_;
  in.oracle = &oracle_;
  in.x = &state.x;
  in.s = &state.s;
  in.theta = state.theta;
  in.g_bar = &ctx.g_bar;
  in.G = &ctx.G;
  in.J = &ctx.J;
  in.iteration = k;
  ctx.W.emplace(hessian_model_.build(in), state.theta, problem_->dim_ineq);
  ctx.psi_bar = barrier_gradient(ctx.g_bar, state.theta, problem_->dim_ineq);
  ctx.q_norm = stationarity_measure(*ctx.block, ctx.psi_bar).norm();
  return ctx;
}

void Solver::finish(SolverState& state, IterationRecord& rec) {
  state.k += 1;
  state.theta = config_.schedule.at(state.k);
  rec.rel_kkt = kkt_residual_norm(*problem_, state.x, state.s, state.theta, true_gradient(state.x)) /
                std::max(ref_scale_, 1.0);
  if (!std::isfinite(rec.rel_kkt)) throw NonFiniteError("non-finite KKT residual");
  rec.charge = charge_for(rec);
  if (rec.rel_kkt <= config_.tol_rel_kkt) state.status = RunStatus::converged;
}

IterationRecord Solver::iterate_once(SolverState& state) {
  if (state.status != RunStatus::running) throw Error("iterate_once called on a finished run");
  const int d = problem_->dim_x, m = problem_->dim_eq, n = problem_->dim_ineq;
  IterationRecord rec;
  rec.k = state.k;
  rec.theta = state.theta;
  rec.delta = state.delta;
  rec.eps_bar = state.eps_bar;
  rec.batch_g = gradient_batch_size(state.delta, oracle_config_);
  rec.batch_h = (config_.hessian == HessianKind::estimated || config_.hessian == HessianKind::averaged) ? 1 : 0;

  Context ctx = prepare(state, rec.batch_g);
  const ConstraintBlock& block = *ctx.block;
  const BarrierHessian& W = *ctx.W;
  rec.norm_q_bar = ctx.q_norm;
  rec.norm_q_true =
      stationarity_measure(block, barrier_gradient(true_gradient(state.x), state.theta, n)).norm();
  rec.hessian_norm = W.hessian_norm();
  rec.w_norm = W.norm();
  rec.residual_norm = block.residual().norm();

  if (ctx.q_norm / std::max(1.0, W.norm()) < config_.eta * state.delta) {
    rec.classification = StepClass::gate_fail;
    rec.mu_bar = state.mu_bar;
    rec.flops = iteration_flops(d, m, n, config_.hessian, false, 0, 0);
    state.delta /= config_.gamma;
    state.eps_bar /= config_.gamma;
    finish(state, rec);
    return rec;
  }

  StepResult step = compute_step(block, W, ctx.psi_bar, state.delta, config_.step_params());
  PredictedReduction pr = predicted_reduction(ctx.psi_bar, W, block, step);
  rec.pred_threshold = merit_threshold(ctx.q_norm, W.norm(), state.delta, config_.eps_s, config_.kappa_fcd);
  MeritUpdate mu = merit_loop({state.mu_bar, config_.rho, config_.mu_cap}, rec.pred_threshold, pr);
  state.mu_bar = mu.mu_bar;
  rec.mu_bar = mu.mu_bar;
  rec.pred = mu.pred;
  rec.merit_turns = mu.turns;
  rec.gamma_bar = step.gamma_bar;
  rec.linearized_residual = pr.linearized_residual;
  rec.tangential_decrease = step.tangential_decrease;
  rec.cauchy_decrease = step.cauchy_decrease;
  rec.used_cauchy = step.used_cauchy;
  rec.step_norm = step.d_tilde().norm();
  rec.flops = iteration_flops(d, m, n, config_.hessian, true, step.w_applies, step.projections);

  Vector x_trial = state.x + step.dx;
  Vector s_trial = slack_update(state.s, step, config_.eps_s);
  rec.batch_f = value_batch_size(state.delta, state.eps_bar, oracle_config_);
  ValuePair vals = oracle_.values(state.x, x_trial, rec.batch_f, static_cast<std::uint64_t>(state.k));
  Vector c_trial = problem_->c(x_trial);
  Vector h_trial = problem_->h(x_trial);
  rec.ared = actual_reduction(vals.current, vals.trial, state.s, s_trial, ctx.c, ctx.h, c_trial, h_trial,
                              state.theta, state.mu_bar);
  if (!std::isfinite(rec.ared)) throw NonFiniteError("non-finite actual reduction");

  if (rec.ared <= config_.eta * rec.pred) {
    rec.min_slack_ratio = n > 0 ? s_trial.cwiseQuotient(state.s).minCoeff() : 1.0;
    state.x = std::move(x_trial);
    state.s = std::move(s_trial);
    state.delta = std::min(config_.gamma * state.delta, config_.delta_max);
    if (-rec.pred >= state.eps_bar) {
      rec.classification = StepClass::reliable;
      state.eps_bar *= config_.gamma;
    } else {
      rec.classification = StepClass::unreliable;
      state.eps_bar /= config_.gamma;
    }
  } else {
    rec.classification = StepClass::ratio_fail;
    state.delta /= config_.gamma;
    state.eps_bar /= config_.gamma;
  }
  finish(state, rec);
  return rec;
}

double Solver::radius_for_baseline(double q_norm) const {
  return config_.fs_beta * std::min(config_.fs_zeta * q_norm, config_.fs_delta);
}

double Solver::baseline_threshold(double q_norm, double w_norm, double delta) const {
  const double eps = config_.eps_s;
  double linear = q_norm * std::min(delta, eps);
  double quad = 0.5 * w_norm * std::min(delta * delta, eps * eps);
  switch (config_.fs_threshold) {
    case BaselineThreshold::decrease: return -linear + quad;
    case BaselineThreshold::negated: return -(linear + quad);
    case BaselineThreshold::literal: return linear + quad;
  }
  return -linear + quad;
}

IterationRecord Solver::iterate_fully_stochastic(SolverState& state) {
  if (state.status != RunStatus::running) throw Error("iterate_fully_stochastic called on a finished run");
  const int d = problem_->dim_x, m = problem_->dim_eq, n = problem_->dim_ineq;
  IterationRecord rec;
  rec.k = state.k;
  rec.theta = state.theta;
  rec.eps_bar = state.eps_bar;
  rec.batch_g = config_.fs_batch;
  rec.batch_h = (config_.hessian == HessianKind::estimated || config_.hessian == HessianKind::averaged) ? 1 : 0;

  Context ctx = prepare(state, rec.batch_g);
  const ConstraintBlock& block = *ctx.block;
  const BarrierHessian& W = *ctx.W;
  rec.norm_q_bar = ctx.q_norm;
  rec.norm_q_true =
      stationarity_measure(block, barrier_gradient(true_gradient(state.x), state.theta, n)).norm();
  rec.hessian_norm = W.hessian_norm();
  rec.w_norm = W.norm();
  rec.residual_norm = block.residual().norm();

  const double delta = radius_for_baseline(ctx.q_norm);
  state.delta = delta;
  rec.delta = delta;

  StepResult step = compute_step(block, W, ctx.psi_bar, delta, config_.step_params());
  PredictedReduction pr = predicted_reduction(ctx.psi_bar, W, block, step);
  rec.pred_threshold = baseline_threshold(ctx.q_norm, W.norm(), delta);
  MeritUpdate mu = merit_loop({state.mu_bar, config_.fs_rho, config_.mu_cap}, rec.pred_threshold, pr);
  state.mu_bar = mu.mu_bar;
  rec.mu_bar = mu.mu_bar;
  rec.pred = mu.pred;
  rec.merit_turns = mu.turns;
  rec.gamma_bar = step.gamma_bar;
  rec.linearized_residual = pr.linearized_residual;
  rec.tangential_decrease = step.tangential_decrease;
  rec.cauchy_decrease = step.cauchy_decrease;
  rec.used_cauchy = step.used_cauchy;
  rec.step_norm = step.d_tilde().norm();
  rec.flops = iteration_flops(d, m, n, config_.hessian, true, step.w_applies, step.projections);

  Vector s_next = slack_update(state.s, step, config_.eps_s);
  rec.min_slack_ratio = n > 0 ? s_next.cwiseQuotient(state.s).minCoeff() : 1.0;
  state.x += step.dx;
  state.s = std::move(s_next);
  if (!state.x.allFinite() || !state.s.allFinite()) throw NonFiniteError("non-finite iterate");
  rec.classification = StepClass::accepted;
  finish(state, rec);
  return rec;
}

namespace {

template <typename Step>
RunTrace run(const ProblemInstance& problem, NoiseModel noise, const SolverConfig& config, const OracleConfig& oracle,
             std::uint64_t seed, const std::string& method, Step step) {
  noise.seed = seed;
  Solver solver(problem, noise, config, oracle);
  RunTrace trace;
  trace.problem = problem.name;
  trace.method = method;
  trace.budget_kind = config.budget.kind;
  trace.ref_scale = solver.ref_scale();
  SolverState state = solver.initialize();
  trace.initial_rel_kkt =
      kkt_residual_norm(problem, state.x, state.s, state.theta) / std::max(trace.ref_scale, 1.0);
  trace.final_rel_kkt = trace.initial_rel_kkt;
  if (trace.initial_rel_kkt <= config.tol_rel_kkt) state.status = RunStatus::converged;
  while (state.status == RunStatus::running) {
    if (trace.budget_used >= config.budget.limit || state.k >= config.max_iters) {
      state.status = RunStatus::budget_exhausted;
      break;
    }
    try {
      IterationRecord rec = step(solver, state);
      trace.gradient_samples += rec.batch_g;
      trace.value_samples += 2 * static_cast<std::int64_t>(rec.batch_f);
      trace.hessian_samples += rec.batch_h;
      trace.flops += rec.flops;
      trace.budget_used += rec.charge;
      trace.final_rel_kkt = rec.rel_kkt;
      trace.records.push_back(rec);
    } catch (const SingularConstraintError& e) {
      state.status = RunStatus::singular;
      trace.message = e.what();
      break;
    } catch (const MeritDivergenceError& e) {
      state.status = RunStatus::merit_divergence;
      trace.message = e.what();
      break;
    } catch (const NonFiniteError& e) {
      state.status = RunStatus::non_finite;
      trace.message = e.what();
      break;
    } catch (const DomainError& e) {
      state.status = RunStatus::non_finite;
      trace.message = e.what();
      break;
    }
  }
  trace.status = state.status;
  trace.final_state = std::move(state);
  return trace;
}

}  // namespace

RunTrace solve(const ProblemInstance& problem, NoiseModel noise, const SolverConfig& config,
               const OracleConfig& oracle, std::uint64_t seed) {
  return run(problem, noise, config, oracle, seed, "TR-IP-SSQP-" + to_string(config.hessian),
             [](Solver& s, SolverState& st) { return s.iterate_once(st); });
}

RunTrace solve_fully_stochastic(const ProblemInstance& problem, NoiseModel noise, const SolverConfig& config,
                                const OracleConfig& oracle, std::uint64_t seed) {
  return run(problem, noise, config, oracle, seed, "Fully-TR-IP-SSQP-" + to_string(config.hessian),
             [](Solver& s, SolverState& st) { return s.iterate_fully_stochastic(st); });
}

}  // namespace tripssqp
