#include "tripssqp/oracle.hpp"

#include <cmath>
#include <random>

#include "tripssqp/errors.hpp"
#include "tripssqp/rng.hpp"

namespace tripssqp {
namespace {

int clamp_batch(double raw, int max_batch) {
  if (!(raw < static_cast<double>(max_batch))) return max_batch;
  return std::max(1, static_cast<int>(std::ceil(raw)));
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw NonFiniteError(std::string("non-finite ") + what + " estimate");
}

}  // namespace

void OracleConfig::validate() const {
  if (!(kappa_g > 0.0) || !(kappa_f > 0.0)) throw ConfigError("kappa_g and kappa_f must be positive");
  if (!(p_g > 0.0 && p_g < 1.0) || !(p_f > 0.0 && p_f < 1.0))
    throw ConfigError("p_g and p_f must lie in (0,1)");
  if (!(C_g > 0.0) || !(C_f > 0.0)) throw ConfigError("C_g and C_f must be positive");
  if (max_batch < 1) throw ConfigError("max_batch must be at least 1");
}

int gradient_batch_size(double delta, const OracleConfig& config) {
  double raw = config.C_g / (config.p_g * config.kappa_g * config.kappa_g * delta * delta);
  return clamp_batch(raw, config.max_batch);
}

int value_batch_size(double delta, double eps_bar, const OracleConfig& config) {
  double d2 = delta * delta;
  double accuracy = std::min(config.p_f * config.kappa_f * config.kappa_f * d2 * d2, eps_bar * eps_bar);
  return clamp_batch(config.C_f / accuracy, config.max_batch);
}

Oracle::Oracle(const ProblemInstance& problem, NoiseModel noise) : problem_(&problem), noise_(noise) {
  if (noise_.kind == NoiseKind::subsample && !problem.finite_sum)
    throw ConfigError(problem.name + ": subsampling needs a finite-sum objective");
  if (noise_.sigma2 < 0.0) throw ConfigError("noise variance must be non-negative");
}

GradientEstimate Oracle::gradient(const Vector& x, int batch, std::uint64_t iteration) const {
  GradientEstimate out;
  out.batch_size = batch;
  auto rng = keyed_engine(noise_.seed, iteration, Stream::gradient);
  if (noise_.kind == NoiseKind::subsample) {
    const auto& data = *problem_->finite_sum;
    std::uniform_int_distribution<int> pick(0, data.size() - 1);
    out.value = Vector::Zero(problem_->dim_x);
    for (int b = 0; b < batch; ++b) data.add_sample_gradient(x, pick(rng), out.value);
    out.value /= static_cast<double>(batch);
  } else {
    out.value = problem_->grad_f(x);
    if (noise_.sigma2 > 0.0) {
      // ξ = σ(z + w𝟙) has covariance σ²(I + 𝟙𝟙ᵀ); the batch mean scales by 1/√B.
      std::normal_distribution<double> normal(0.0, 1.0);
      const double scale = std::sqrt(noise_.sigma2 / batch);
      const double shared = normal(rng);
      for (Eigen::Index i = 0; i < out.value.size(); ++i) out.value[i] += scale * (normal(rng) + shared);
    }
  }
  require_finite(out.value, "gradient");
  return out;
}

double Oracle::value(const Vector& x, int batch, std::uint64_t iteration, Stream stream) const {
  auto rng = keyed_engine(noise_.seed, iteration, stream);
  double out = 0.0;
  if (noise_.kind == NoiseKind::subsample) {
    const auto& data = *problem_->finite_sum;
    std::uniform_int_distribution<int> pick(0, data.size() - 1);
    for (int b = 0; b < batch; ++b) out += data.sample_value(x, pick(rng));
    out /= static_cast<double>(batch);
  } else {
    out = problem_->f(x);
    if (noise_.sigma2 > 0.0) {
      std::normal_distribution<double> normal(0.0, std::sqrt(noise_.sigma2 / batch));
      out += normal(rng);
    }
  }
  if (!std::isfinite(out)) throw NonFiniteError("non-finite objective estimate");
  return out;
}

ValuePair Oracle::values(const Vector& x, const Vector& x_trial, int batch, std::uint64_t iteration) const {
  return {value(x, batch, iteration, Stream::value_current),
          value(x_trial, batch, iteration, Stream::value_trial), batch};
}

Matrix Oracle::hessian(const Vector& x, std::uint64_t iteration) const {
  auto rng = keyed_engine(noise_.seed, iteration, Stream::hessian);
  const int d = problem_->dim_x;
  Matrix out;
  if (noise_.kind == NoiseKind::subsample) {
    const auto& data = *problem_->finite_sum;
    std::uniform_int_distribution<int> pick(0, data.size() - 1);
    out = Matrix::Zero(d, d);
    data.add_sample_hessian(x, pick(rng), out);
  } else {
    if (!problem_->has_hessian()) throw ConfigError(problem_->name + ": no objective Hessian available");
    out = problem_->hess_f(x);
    if (noise_.sigma2 > 0.0) {
      std::normal_distribution<double> normal(0.0, std::sqrt(noise_.sigma2));
      for (int j = 0; j < d; ++j) {
        for (int i = 0; i <= j; ++i) {
          double e = normal(rng);
          out(i, j) += e;
          if (i != j) out(j, i) += e;
        }
      }
    }
  }
  if (!out.allFinite()) throw NonFiniteError("non-finite Hessian estimate");
  return out;
}

GradientEstimate estimate_gradient(const ProblemInstance& problem, const NoiseModel& noise, const Vector& x,
                                   double delta, const OracleConfig& config, std::uint64_t iteration) {
  return Oracle(problem, noise).gradient(x, gradient_batch_size(delta, config), iteration);
}

ValuePair estimate_value_pair(const ProblemInstance& problem, const NoiseModel& noise, const Vector& x,
                              const Vector& x_trial, double delta, double eps_bar,
                              const OracleConfig& config, std::uint64_t iteration) {
  return Oracle(problem, noise).values(x, x_trial, value_batch_size(delta, eps_bar, config), iteration);
}

}  // namespace tripssqp
