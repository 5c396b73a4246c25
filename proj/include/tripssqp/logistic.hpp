#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tripssqp/problem.hpp"

namespace tripssqp {

enum class LogisticDataset { normal_synthetic, exponential_synthetic, csv_file };

/// Constrained logistic regression
///   min (1/N) Σ log(1 + exp(−yᵢ zᵢᵀx))  s.t.  Ax = b,  ‖x‖² ≤ c.
///
/// A, b and c_radius are drawn from `seed` when left empty (A, b standard
/// normal with A of full row rank; c = 1 + σ², σ standard normal).
struct LogisticProblemConfig {
  LogisticDataset dataset = LogisticDataset::normal_synthetic;
  int d = 15;
  int N = 60000;
  Matrix A;
  Vector b;
  double c_radius = 0.0;
  std::uint64_t seed = 0;
  std::string csv_path;
  std::string label_column = "label";
};

struct Dataset {
  Matrix features;  // N × d
  Vector labels;    // ±1
  std::vector<std::string> feature_names;
};

/// Reads a comma-separated file with a header row. Non-numeric columns are
/// one-hot encoded, every feature is standardized with the sample standard
/// deviation (divisor N−1) and constant columns are dropped. Labels may be
/// {0,1}, {−1,1} or two distinct strings (lexicographically smaller → −1).
Dataset load_csv_dataset(const std::string& path, const std::string& label_column);

/// Two equally sized classes: +1 entries ~ N(0,1) or Exp(1); −1 entries
/// ~ N(5,1) or 5 + Exp(1).
Dataset generate_synthetic_dataset(LogisticDataset kind, int d, int N, std::uint64_t seed);

/// Logistic loss over a fixed dataset; samples are data points.
class LogisticLoss final : public FiniteSumObjective {
 public:
  explicit LogisticLoss(const Dataset& data);

  int size() const override { return static_cast<int>(labels_.size()); }
  int dim() const { return static_cast<int>(points_.rows()); }
  double sample_value(const Vector& x, int i) const override;
  void add_sample_gradient(const Vector& x, int i, Vector& out) const override;
  void add_sample_hessian(const Vector& x, int i, Matrix& out) const override;

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  Matrix hessian(const Vector& x) const;

 private:
  Matrix points_;  // d × N, one column per sample
  Vector labels_;
};

/// log(1 + e^{−t}) without overflow.
double log1p_exp_neg(double t);

ProblemInstance make_logistic_problem(const LogisticProblemConfig& config);

/// Same as above with the data already in memory (config.dataset is ignored).
ProblemInstance make_logistic_problem(const Dataset& data, const LogisticProblemConfig& config);

}  // namespace tripssqp
