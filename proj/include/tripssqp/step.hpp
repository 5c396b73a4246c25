#pragma once

#include "tripssqp/hessian.hpp"
#include "tripssqp/kkt.hpp"

namespace tripssqp {

struct StepParams {
  double zeta = 0.5;
  double eps_s = 0.9;
  double kappa_fcd = 1.0;
};

enum class CgStop { zero_gradient, converged, boundary, negative_curvature, iteration_cap };

struct CauchyPoint {
  Vector step;
  double decrease = 0.0;  // m(t_c) − m(0)
};

struct TangentialStep {
  Vector step;
  double decrease = 0.0;         // m(t̃) − m(0)
  double cauchy_decrease = 0.0;  // at radius min{Δ̂, ε_s − ‖w̃ˢ‖}
  double cauchy_radius = 0.0;
  double boundary_scale = 1.0;   // fraction-to-boundary factor applied to the CG step
  bool used_cauchy = false;
  CgStop stop = CgStop::zero_gradient;
  int cg_iterations = 0;
  int w_applies = 0;
  int projections = 0;
};

/// Rescaled trial step d̃ = w̃ + t̃ = (Δx; S⁻¹Δs).
struct StepResult {
  Vector dx;
  Vector ds_tilde;
  Vector w_tilde;
  Vector t_tilde;
  double gamma_bar = 1.0;
  double tangential_decrease = 0.0;
  double cauchy_decrease = 0.0;
  double tangential_radius = 0.0;  // Δ̂
  bool used_cauchy = false;
  int cg_iterations = 0;
  int w_applies = 0;
  int projections = 0;

  Vector d_tilde() const;
  /// Δs = S·(S⁻¹Δs).
  Vector ds(const Vector& s) const { return s.cwiseProduct(ds_tilde); }
};

/// v = −Aᵀ(AAᵀ)⁻¹ϑ, the minimum-norm solution of ϑ + Av = 0.
Vector normal_step(const ConstraintBlock& block);

/// γ̄ = min{ζε_s/‖ṽˢ‖, ζΔ/‖v‖, 1}; a zero denominator drops its term.
double normal_scaling(const Vector& v, const Vector& v_slack, double delta, double zeta, double eps_s);

/// Tangential model m(t) = ½tᵀW̄t + rhsᵀt.
double tangential_model(const BarrierHessian& W, const Vector& rhs, const Vector& t);

/// Minimizer of m along −P·rhs inside the ball of the given radius.
CauchyPoint cauchy_point(const ConstraintBlock& block, const BarrierHessian& W, const Vector& rhs, double radius);

/// Projected Steihaug CG on  min m(t)  s.t.  At = 0, ‖t‖ ≤ Δ̂, followed by
/// fraction-to-boundary truncation tˢ ≥ −ε_s𝟙 − w̃ˢ. Falls back to the
/// Cauchy point at radius min{Δ̂, ε_s − ‖w̃ˢ‖} when the truncated CG step does
/// not reach κ_fcd times its decrease.
TangentialStep tangential_step(const ConstraintBlock& block, const BarrierHessian& W, const Vector& rhs,
                               double delta_hat, double eps_s, const Vector& w_slack, double kappa_fcd);

/// s + Δs, with components that round below (1 − ε_s)s moved up to the
/// smallest value that satisfies the fraction-to-boundary rule.
Vector slack_update(const Vector& s, const StepResult& step, double eps_s);

StepResult assemble_step(const Vector& v, double gamma_bar, const TangentialStep& tangential, int dim_x);

/// Full normal/tangential computation for trust radius Δ and ψ̄.
StepResult compute_step(const ConstraintBlock& block, const BarrierHessian& W, const Vector& psi_bar,
                        double delta, const StepParams& params);

}  // namespace tripssqp
