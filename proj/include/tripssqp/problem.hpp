#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "tripssqp/types.hpp"

namespace tripssqp {

/// Objective of the form f(x) = (1/N) Σᵢ fᵢ(x), sampled by the subsampling
/// oracle. Implementations are immutable after construction.
class FiniteSumObjective {
 public:
  virtual ~FiniteSumObjective() = default;

  virtual int size() const = 0;
  virtual double sample_value(const Vector& x, int i) const = 0;
  /// Adds ∇fᵢ(x) into `out`.
  virtual void add_sample_gradient(const Vector& x, int i, Vector& out) const = 0;
  /// Adds ∇²fᵢ(x) into `out`.
  virtual void add_sample_hessian(const Vector& x, int i, Matrix& out) const = 0;
};

/// Deterministic core of  min f(x)  s.t.  c(x) = 0,  h(x) ≤ 0.
///
/// Every evaluator is pure. The constraint curvature callbacks return the
/// weighted sums Σ wᵢ ∇²cᵢ(x) and Σ wᵢ ∇²hᵢ(x); they may be left empty when
/// the corresponding constraints are linear.
struct ProblemInstance {
  std::string name;
  int dim_x = 0;
  int dim_eq = 0;
  int dim_ineq = 0;

  std::function<double(const Vector&)> f;
  std::function<Vector(const Vector&)> grad_f;
  std::function<Matrix(const Vector&)> hess_f;

  std::function<Vector(const Vector&)> c;
  std::function<Matrix(const Vector&)> G;
  std::function<Vector(const Vector&)> h;
  std::function<Matrix(const Vector&)> J;
  std::function<Matrix(const Vector&, const Vector&)> eq_curvature;
  std::function<Matrix(const Vector&, const Vector&)> ineq_curvature;

  Vector x0;
  std::optional<Vector> known_solution;
  std::optional<Vector> known_eq_multipliers;
  std::optional<Vector> known_ineq_multipliers;

  /// Present for data-driven objectives; enables subsampling.
  std::shared_ptr<const FiniteSumObjective> finite_sum;

  bool has_hessian() const { return static_cast<bool>(hess_f); }

  /// Σ λᵢ∇²cᵢ + Σ τᵢ∇²hᵢ (zero for linear constraints).
  Matrix constraint_curvature(const Vector& x, const Vector& lambda, const Vector& tau) const;

  /// Checks dimensions and structural invariants; throws ConfigError.
  void validate() const;
};

enum class NoiseKind { gaussian, subsample };

struct NoiseModel {
  double sigma2 = 0.0;
  NoiseKind kind = NoiseKind::gaussian;
  std::uint64_t seed = 0;
};

struct DerivativeCheck {
  double grad_error = 0.0;
  double eq_jacobian_error = 0.0;
  double ineq_jacobian_error = 0.0;

  double worst() const;
};

/// Central-difference check of ∇f, G and J at `x` (step 1e-6·(1+|xᵢ|)).
/// Errors are relative: ‖analytic − fd‖ / max(1, ‖fd‖), entrywise max.
DerivativeCheck check_derivatives(const ProblemInstance& problem, const Vector& x);

}  // namespace tripssqp
