#include "tripssqp/merit.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "tripssqp/errors.hpp"

namespace tripssqp {
namespace {

double log_barrier(const Vector& s) {
  if ((s.array() <= 0.0).any()) throw DomainError("log barrier needs positive slacks");
  return s.array().log().sum();
}

double violation(const Vector& c, const Vector& h, const Vector& s) {
  return std::sqrt(c.squaredNorm() + (h + s).squaredNorm());
}

}  // namespace

double merit_value(double f, const Vector& s, const Vector& c, const Vector& h, double theta, double mu_bar) {
  return f - theta * log_barrier(s) + mu_bar * violation(c, h, s);
}

PredictedReduction predicted_reduction(const Vector& psi_bar, const BarrierHessian& W,
                                       const ConstraintBlock& block, const StepResult& step) {
  Vector d = step.d_tilde();
  PredictedReduction out;
  out.model = psi_bar.dot(d) + 0.5 * W.quadratic(d);
  out.linearized_residual = (block.residual() + block.A() * d).norm();
  // ϑ + Ad̃ = (1 − γ̄)ϑ
  out.feasibility_change = -step.gamma_bar * block.residual().norm();
  return out;
}

double merit_threshold(double q_norm, double w_norm, double delta, double eps_s, double kappa_fcd) {
  double radius = std::min(delta, eps_s);
  if (w_norm > 0.0) radius = std::min(radius, q_norm / w_norm);
  return -0.5 * kappa_fcd * q_norm * radius;
}

MeritUpdate merit_loop(const MeritState& state, double threshold, const PredictedReduction& pred) {
  MeritUpdate out{state.mu_bar, pred.at(state.mu_bar), 0};
  while (out.pred > threshold) {
    out.mu_bar *= state.rho;
    ++out.turns;
    if (out.mu_bar > state.mu_cap) {
      std::ostringstream msg;
      msg << "merit parameter exceeded " << state.mu_cap << " (Pred model " << pred.model
          << ", feasibility change " << pred.feasibility_change << ", threshold " << threshold << ")";
      throw MeritDivergenceError(msg.str());
    }
    out.pred = pred.at(out.mu_bar);
  }
  return out;
}

double actual_reduction(double f_bar, double f_bar_trial, const Vector& s, const Vector& s_trial,
                        const Vector& c, const Vector& h, const Vector& c_trial, const Vector& h_trial,
                        double theta, double mu_bar) {
  if ((s.array() <= 0.0).any() || (s_trial.array() <= 0.0).any())
    throw DomainError("actual reduction needs positive slacks");
  double barrier = (s_trial.array().log() - s.array().log()).sum();
  return f_bar_trial - f_bar - theta * barrier + mu_bar * (violation(c_trial, h_trial, s_trial) - violation(c, h, s));
}

}  // namespace tripssqp
