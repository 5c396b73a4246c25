#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>

#include "tripssqp/kkt.hpp"
#include "tripssqp/oracle.hpp"

namespace tripssqp {

enum class HessianKind { identity, sr1, estimated, averaged };

std::string to_string(HessianKind kind);
/// Accepts "Id", "SR1", "EstH", "AveH" (case-insensitive). Throws ConfigError.
HessianKind parse_hessian_kind(const std::string& text);

/// W̄ = diag(H̄, θI) acting on rescaled steps (Δx; S⁻¹Δs).
class BarrierHessian {
 public:
  BarrierHessian(Matrix H, double theta, int dim_ineq);

  Vector apply(const Vector& v) const;
  double quadratic(const Vector& v) const { return v.dot(apply(v)); }
  /// max{‖H̄‖₂, θ}, from a symmetric eigensolve of H̄.
  double norm() const { return norm_; }
  double hessian_norm() const { return hessian_norm_; }
  const Matrix& H() const { return H_; }
  double theta() const { return theta_; }
  int dim_x() const { return static_cast<int>(H_.rows()); }
  int dim_ineq() const { return dim_ineq_; }

 private:
  Matrix H_;
  double theta_;
  int dim_ineq_;
  double hessian_norm_;
  double norm_;
};

BarrierHessian assemble_W(Matrix H, double theta, int dim_ineq);

/// Per-iteration inputs of the Hessian construction.
struct HessianInputs {
  const ProblemInstance* problem = nullptr;
  const Oracle* oracle = nullptr;
  const Vector* x = nullptr;
  const Vector* s = nullptr;
  double theta = 0.0;
  const Vector* g_bar = nullptr;
  const Matrix* G = nullptr;  // G(x)
  const Matrix* J = nullptr;  // J(x)
  std::uint64_t iteration = 0;
};

/// H̄ₖ under one of four constructions:
///   Id  : identity;
///   SR1 : symmetric rank-one updates of H̄₀ = I driven by the sampled
///          Lagrangian gradient ∇̄ₓL = ḡ + Gᵀλ̄ + Jᵀτ;
///   EstH: one-sample ∇̄²f plus exact constraint curvature weighted by
///          λ̄ = −(GGᵀ)⁻¹G(ḡ + θJᵀS⁻¹𝟙) and τ = θS⁻¹𝟙;
///   AveH: mean of the last min(k+1, 50) EstH matrices.
/// Holds per-run state; use one instance per solve.
class HessianModel {
 public:
  static constexpr int kAverageWindow = 50;
  static constexpr double kSr1SkipTolerance = 1e-8;

  explicit HessianModel(HessianKind kind) : kind_(kind) {}

  HessianKind kind() const { return kind_; }
  Matrix build(const HessianInputs& in);

  /// Number of SR1 updates applied / skipped so far.
  int sr1_updates() const { return sr1_updates_; }
  int sr1_skips() const { return sr1_skips_; }

  /// One SR1 update H ← H + rrᵀ/(rᵀΔx), r = y − HΔx; skipped (returns
  /// false) when |rᵀΔx| < 1e-8‖r‖‖Δx‖.
  static bool sr1_update(Matrix& H, const Vector& dx, const Vector& y);

 private:
  Matrix sampled_lagrangian_hessian(const HessianInputs& in) const;

  HessianKind kind_;
  // SR1
  std::optional<Matrix> sr1_H_;
  std::optional<Vector> sr1_x_;
  std::optional<Vector> sr1_grad_;
  int sr1_updates_ = 0;
  int sr1_skips_ = 0;
  // AveH
  std::deque<Matrix> window_;
};

}  // namespace tripssqp
