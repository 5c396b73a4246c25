#include "tripssqp/logistic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/SVD>

#include "tripssqp/errors.hpp"
#include "tripssqp/rng.hpp"

namespace tripssqp {
namespace {

std::string trim(std::string_view s) {
  auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(" \t\r\"");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

Vector map_labels(const std::vector<std::string>& raw) {
  std::set<std::string> distinct(raw.begin(), raw.end());
  if (distinct.size() != 2) {
    throw LabelError("labels must take exactly two distinct values, found " +
                     std::to_string(distinct.size()));
  }
  double lo = 0.0, hi = 0.0;
  bool numeric = parse_double(*distinct.begin(), lo) && parse_double(*distinct.rbegin(), hi);
  if (numeric) {
    if (lo > hi) std::swap(lo, hi);
    bool binary01 = lo == 0.0 && hi == 1.0;
    bool binary_pm = lo == -1.0 && hi == 1.0;
    if (!binary01 && !binary_pm) throw LabelError("numeric labels must be {0,1} or {-1,1}");
  }
  const std::string& negative = *distinct.begin();
  Vector labels(static_cast<Eigen::Index>(raw.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (numeric) {
      double v = 0.0;
      parse_double(raw[i], v);
      labels[static_cast<Eigen::Index>(i)] = v > lo ? 1.0 : -1.0;
    } else {
      labels[static_cast<Eigen::Index>(i)] = raw[i] == negative ? -1.0 : 1.0;
    }
  }
  return labels;
}

Matrix draw_normal(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) out(i, j) = normal(rng);
  return out;
}

bool full_row_rank(const Matrix& A) {
  if (A.rows() > A.cols()) return false;
  Eigen::JacobiSVD<Matrix> svd(A);
  return svd.singularValues().minCoeff() > 1e-10;
}

}  // namespace

Dataset load_csv_dataset(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw CsvParseError("cannot open " + path);

  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    header = split_row(line);
    break;
  }
  if (header.empty()) throw EmptyDatasetError(path + ": no header row");
  auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) throw CsvParseError(path + ": no column named '" + label_column + "'");
  const auto label_index = static_cast<std::size_t>(label_it - header.begin());

  std::vector<std::vector<std::string>> cells(header.size());
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto row = split_row(line);
    if (row.size() != header.size()) {
      throw CsvParseError(path + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(header.size()) + " fields, got " + std::to_string(row.size()));
    }
    for (std::size_t j = 0; j < row.size(); ++j) cells[j].push_back(std::move(row[j]));
  }
  const std::size_t rows = cells[0].size();
  if (rows == 0) throw EmptyDatasetError(path + ": no data rows");

  Dataset out;
  out.labels = map_labels(cells[label_index]);

  std::vector<Vector> columns;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j == label_index) continue;
    Vector numeric(static_cast<Eigen::Index>(rows));
    bool is_numeric = true;
    for (std::size_t i = 0; i < rows && is_numeric; ++i)
      is_numeric = parse_double(cells[j][i], numeric[static_cast<Eigen::Index>(i)]);
    if (is_numeric) {
      columns.push_back(std::move(numeric));
      out.feature_names.push_back(header[j]);
      continue;
    }
    std::set<std::string> levels(cells[j].begin(), cells[j].end());
    for (const auto& level : levels) {
      Vector indicator(static_cast<Eigen::Index>(rows));
      for (std::size_t i = 0; i < rows; ++i)
        indicator[static_cast<Eigen::Index>(i)] = cells[j][i] == level ? 1.0 : 0.0;
      columns.push_back(std::move(indicator));
      out.feature_names.push_back(header[j] + "=" + level);
    }
  }

  std::vector<Vector> kept;
  std::vector<std::string> kept_names;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (rows < 2) break;
    const Vector& col = columns[j];
    double mean = col.mean();
    double sd = std::sqrt((col.array() - mean).square().sum() / static_cast<double>(rows - 1));
    if (!(sd > 0.0)) continue;
    kept.push_back((col.array() - mean) / sd);
    kept_names.push_back(out.feature_names[j]);
  }
  if (kept.empty()) throw EmptyDatasetError(path + ": no non-constant feature columns");

  out.features.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) out.features.col(static_cast<Eigen::Index>(j)) = kept[j];
  out.feature_names = std::move(kept_names);
  return out;
}

Dataset generate_synthetic_dataset(LogisticDataset kind, int d, int N, std::uint64_t seed) {
  if (kind == LogisticDataset::csv_file) throw ConfigError("csv datasets are not synthetic");
  if (d < 1 || N < 2) throw ConfigError("synthetic dataset needs d ≥ 1 and N ≥ 2");
  std::mt19937_64 rng(hash_key({seed, 0x64617461ULL}));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  Dataset out;
  out.features.resize(N, d);
  out.labels.resize(N);
  const int positives = (N + 1) / 2;
  for (int i = 0; i < N; ++i) {
    const bool positive = i < positives;
    out.labels[i] = positive ? 1.0 : -1.0;
    const double shift = positive ? 0.0 : 5.0;
    for (int j = 0; j < d; ++j) {
      double draw = kind == LogisticDataset::normal_synthetic ? normal(rng) : expo(rng);
      out.features(i, j) = shift + draw;
    }
  }
  for (int j = 0; j < d; ++j) out.feature_names.push_back("z" + std::to_string(j));
  return out;
}

double log1p_exp_neg(double t) {
  return t > 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
}

namespace {

// σ(u) = 1/(1+e^{−u}).
double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  double e = std::exp(u);
  return e / (1.0 + e);
}

}  // namespace

LogisticLoss::LogisticLoss(const Dataset& data)
    : points_(data.features.transpose()), labels_(data.labels) {
  if (points_.cols() != labels_.size()) throw ConfigError("feature/label count mismatch");
  if (labels_.size() == 0) throw EmptyDatasetError("empty dataset");
}

double LogisticLoss::sample_value(const Vector& x, int i) const {
  return log1p_exp_neg(labels_[i] * points_.col(i).dot(x));
}

void LogisticLoss::add_sample_gradient(const Vector& x, int i, Vector& out) const {
  double t = labels_[i] * points_.col(i).dot(x);
  out.noalias() -= labels_[i] * sigmoid(-t) * points_.col(i);
}

void LogisticLoss::add_sample_hessian(const Vector& x, int i, Matrix& out) const {
  double t = labels_[i] * points_.col(i).dot(x);
  double w = sigmoid(t) * sigmoid(-t);
  out.noalias() += w * points_.col(i) * points_.col(i).transpose();
}

double LogisticLoss::value(const Vector& x) const {
  Vector t = labels_.cwiseProduct(points_.transpose() * x);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) sum += log1p_exp_neg(t[i]);
  return sum / static_cast<double>(t.size());
}

Vector LogisticLoss::gradient(const Vector& x) const {
  Vector t = labels_.cwiseProduct(points_.transpose() * x);
  Vector w(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) w[i] = -labels_[i] * sigmoid(-t[i]);
  return points_ * w / static_cast<double>(t.size());
}

Matrix LogisticLoss::hessian(const Vector& x) const {
  Vector t = labels_.cwiseProduct(points_.transpose() * x);
  Vector w(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) w[i] = sigmoid(t[i]) * sigmoid(-t[i]);
  return points_ * w.asDiagonal() * points_.transpose() / static_cast<double>(t.size());
}

ProblemInstance make_logistic_problem(const LogisticProblemConfig& config) {
  if (config.dataset == LogisticDataset::csv_file) {
    return make_logistic_problem(load_csv_dataset(config.csv_path, config.label_column), config);
  }
  return make_logistic_problem(generate_synthetic_dataset(config.dataset, config.d, config.N, config.seed),
                               config);
}

ProblemInstance make_logistic_problem(const Dataset& data, const LogisticProblemConfig& config) {
  constexpr int m = 5;
  const int d = static_cast<int>(data.features.cols());
  if (d <= m) throw ConfigError("logistic problem needs more than 5 features, got " + std::to_string(d));

  std::mt19937_64 rng(hash_key({config.seed, static_cast<std::uint64_t>(Stream::problem)}));
  Matrix A = config.A;
  if (A.size() == 0) {
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
      A = draw_normal(rng, m, d);
      ok = full_row_rank(A);
    }
    if (!ok) throw RankError("could not generate a full-row-rank A in 100 attempts");
  } else if (A.rows() != m || A.cols() != d || !full_row_rank(A)) {
    throw RankError("A must be a full-row-rank 5×d matrix");
  }
  Vector b = config.b.size() == m ? config.b : Vector(draw_normal(rng, m, 1));
  double radius = config.c_radius;
  if (!(radius > 0.0)) {
    double sigma = draw_normal(rng, 1, 1)(0, 0);
    radius = 1.0 + sigma * sigma;
  }
  Vector x0 = draw_normal(rng, d, 1);

  auto loss = std::make_shared<const LogisticLoss>(data);
  ProblemInstance p;
  p.name = "logistic";
  p.dim_x = d;
  p.dim_eq = m;
  p.dim_ineq = 1;
  p.f = [loss](const Vector& x) { return loss->value(x); };
  p.grad_f = [loss](const Vector& x) { return loss->gradient(x); };
  p.hess_f = [loss](const Vector& x) { return loss->hessian(x); };
  p.c = [A, b](const Vector& x) -> Vector { return A * x - b; };
  p.G = [A](const Vector&) -> Matrix { return A; };
  p.h = [radius](const Vector& x) { return Vector::Constant(1, x.squaredNorm() - radius); };
  p.J = [](const Vector& x) -> Matrix { return 2.0 * x.transpose(); };
  p.ineq_curvature = [d](const Vector&, const Vector& w) -> Matrix {
    return 2.0 * w[0] * Matrix::Identity(d, d);
  };
  p.x0 = std::move(x0);
  p.finite_sum = loss;
  return p;
}

}  // namespace tripssqp
