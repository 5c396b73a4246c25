#pragma once

#include <cstdint>

#include "tripssqp/problem.hpp"
#include "tripssqp/rng.hpp"

namespace tripssqp {

/// Accuracy targets of the probabilistic oracles and the sample-size rule.
struct OracleConfig {
  double kappa_g = 0.01;
  double kappa_f = 0.0005;
  double p_g = 0.05;
  double p_f = 0.05;
  double C_g = 5.0;
  double C_f = 5.0;
  int max_batch = 10000;

  void validate() const;
};

/// ⌈C_g / (p_g κ_g² Δ²)⌉ clamped to [1, max_batch].
int gradient_batch_size(double delta, const OracleConfig& config);

/// ⌈C_f / min{p_f κ_f² Δ⁴, ε̄²}⌉ clamped to [1, max_batch].
int value_batch_size(double delta, double eps_bar, const OracleConfig& config);

struct GradientEstimate {
  Vector value;
  int batch_size = 0;
};

struct ValuePair {
  double current = 0.0;
  double trial = 0.0;
  int batch_size = 0;
};

/// Sample-average estimators of f, ∇f and ∇²f for one solver run.
///
/// Draws are keyed by (noise seed, iteration, stream), so asking twice for the
/// same iteration reproduces the estimate and different iterations are
/// independent. With the Gaussian model the mean of B draws is sampled
/// directly from its exact distribution N(μ, Σ/B).
class Oracle {
 public:
  Oracle(const ProblemInstance& problem, NoiseModel noise);

  GradientEstimate gradient(const Vector& x, int batch, std::uint64_t iteration) const;

  /// Independent estimates of f(x) and f(x_trial), each from `batch` samples.
  ValuePair values(const Vector& x, const Vector& x_trial, int batch, std::uint64_t iteration) const;

  /// One-sample Hessian estimate of ∇²f(x).
  Matrix hessian(const Vector& x, std::uint64_t iteration) const;

  const NoiseModel& noise() const { return noise_; }

 private:
  double value(const Vector& x, int batch, std::uint64_t iteration, Stream stream) const;

  const ProblemInstance* problem_;
  NoiseModel noise_;
};

GradientEstimate estimate_gradient(const ProblemInstance& problem, const NoiseModel& noise,
                                   const Vector& x, double delta, const OracleConfig& config,
                                   std::uint64_t iteration = 0);

ValuePair estimate_value_pair(const ProblemInstance& problem, const NoiseModel& noise,
                              const Vector& x, const Vector& x_trial, double delta,
                              double eps_bar, const OracleConfig& config,
                              std::uint64_t iteration = 0);

}  // namespace tripssqp
