#pragma once

#include <Eigen/Cholesky>

#include "tripssqp/problem.hpp"

namespace tripssqp {

/// Linearized constraint block of the barrier problem at (x, s):
///   A = [G 0; J S],  ϑ = (c; h + s),
/// together with a Cholesky factorization of A·Aᵀ. The projector
/// P = I − Aᵀ(AAᵀ)⁻¹A is only ever applied, never formed.
class ConstraintBlock {
 public:
  /// Throws SingularConstraintError when AAᵀ is numerically singular
  /// (smallest pivot ≤ 1e-12 · largest pivot).
  ConstraintBlock(const Matrix& G, const Matrix& J, const Vector& c, const Vector& h, const Vector& s);

  int dim_x() const { return dim_x_; }
  int dim_eq() const { return dim_eq_; }
  int dim_ineq() const { return dim_ineq_; }
  /// d + n
  int dim_step() const { return dim_x_ + dim_ineq_; }

  const Matrix& A() const { return A_; }
  const Vector& residual() const { return residual_; }
  const Vector& slack() const { return slack_; }

  /// (AAᵀ)⁻¹ y.
  Vector solve_normal(const Vector& y) const;
  /// P·v.
  Vector project(const Vector& v) const;

 private:
  int dim_x_, dim_eq_, dim_ineq_;
  Matrix A_;
  Vector residual_;
  Vector slack_;
  Eigen::LLT<Matrix> chol_;
};

ConstraintBlock build_block(const ProblemInstance& problem, const Vector& x, const Vector& s);

/// P·v via the factorization of AAᵀ.
Vector project_nullspace(const ConstraintBlock& block, const Vector& v);

struct Multipliers {
  Vector lambda;  // equality multipliers (m)
  Vector tau;     // inequality multipliers (n)
};

/// τ = θS⁻¹𝟙 and λ = −(GGᵀ)⁻¹G(g + JᵀS⁻¹θ𝟙) for a given gradient g; λ is
/// empty when m = 0. Throws SingularConstraintError for rank-deficient G.
Multipliers multipliers_for_gradient(const Matrix& G, const Matrix& J, const Vector& s, double theta,
                                     const Vector& grad);

/// Multipliers at (x, s) using the exact objective gradient.
Multipliers true_multipliers(const ProblemInstance& problem, const Vector& x, const Vector& s, double theta);

/// Q = (Pψ; ϑ).
Vector stationarity_measure(const ConstraintBlock& block, const Vector& psi);

/// ψ = (g; −θ𝟙).
Vector barrier_gradient(const Vector& grad, double theta, int dim_ineq);

/// ‖(∇f + Gᵀλ + Jᵀτ; c; min{−h, τ})‖ with the true multipliers at (x, s, θ).
double kkt_residual_norm(const ProblemInstance& problem, const Vector& x, const Vector& s, double theta);

/// Overload for callers that already hold ∇f(x).
double kkt_residual_norm(const ProblemInstance& problem, const Vector& x, const Vector& s, double theta,
                         const Vector& grad);

/// Reference scale max{‖residual at (x₀, s₀, θ₀)‖, 1}.
double kkt_reference_scale(const ProblemInstance& problem, const Vector& x0, const Vector& s0, double theta0);

/// kkt_residual_norm / max{ref_scale, 1}.
double relative_kkt_residual(const ProblemInstance& problem, const Vector& x, const Vector& s, double theta,
                             double ref_scale);

}  // namespace tripssqp
