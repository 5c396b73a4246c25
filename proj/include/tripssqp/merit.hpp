#pragma once

#include "tripssqp/hessian.hpp"
#include "tripssqp/kkt.hpp"
#include "tripssqp/step.hpp"

namespace tripssqp {

/// L_{μ̄,θ}(x, s) = f − θ Σ ln sᵢ + μ̄‖(c; h + s)‖. `f` may be exact or an
/// estimate. Throws DomainError if any sᵢ ≤ 0.
double merit_value(double f, const Vector& s, const Vector& c, const Vector& h, double theta, double mu_bar);

/// Pred split into its μ̄-independent model part and the change of the
/// linearized constraint violation, so that Pred(μ̄) = model + μ̄·feasibility_change.
struct PredictedReduction {
  double model = 0.0;                // ψ̄ᵀd̃ + ½d̃ᵀW̄d̃
  double feasibility_change = 0.0;   // ‖ϑ + Ad̃‖ − ‖ϑ‖ = −γ̄‖ϑ‖
  double linearized_residual = 0.0;  // ‖ϑ + Ad̃‖ as measured

  double at(double mu_bar) const { return model + mu_bar * feasibility_change; }
};

PredictedReduction predicted_reduction(const Vector& psi_bar, const BarrierHessian& W,
                                       const ConstraintBlock& block, const StepResult& step);

inline double predicted_reduction(const Vector& psi_bar, const BarrierHessian& W, const ConstraintBlock& block,
                                  const StepResult& step, double mu_bar) {
  return predicted_reduction(psi_bar, W, block, step).at(mu_bar);
}

/// −(κ_fcd/2)‖Q̄‖ min{Δ, ε_s, ‖Q̄‖/‖W̄‖}; the last term is dropped when ‖W̄‖ = 0.
double merit_threshold(double q_norm, double w_norm, double delta, double eps_s, double kappa_fcd);

struct MeritState {
  double mu_bar = 1.0;
  double rho = 1.5;
  double mu_cap = 1e10;
};

struct MeritUpdate {
  double mu_bar = 0.0;
  double pred = 0.0;
  int turns = 0;
};

/// Multiplies μ̄ by ρ until Pred(μ̄) ≤ threshold; returns the smallest such
/// μ̄ρʲ. Throws MeritDivergenceError once μ̄ would exceed mu_cap.
MeritUpdate merit_loop(const MeritState& state, double threshold, const PredictedReduction& pred);

/// Ared = f̄ₛ − f̄ − θΣ[ln sₛ − ln s] + μ̄(‖(cₛ; hₛ + sₛ)‖ − ‖(c; h + s)‖).
double actual_reduction(double f_bar, double f_bar_trial, const Vector& s, const Vector& s_trial,
                        const Vector& c, const Vector& h, const Vector& c_trial, const Vector& h_trial,
                        double theta, double mu_bar);

}  // namespace tripssqp
