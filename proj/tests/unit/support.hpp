#pragma once

#include <Eigen/SVD>
#include <random>

#include "tripssqp/kkt.hpp"
#include "tripssqp/types.hpp"

namespace tripssqp::fixtures {

inline Matrix pseudo_inverse(const Matrix& A) {
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double tol = 1e-13 * std::max(A.rows(), A.cols()) * (sv.size() ? sv(0) : 0.0);
  Matrix inv_sigma = Matrix::Zero(A.cols(), A.rows());
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) inv_sigma(i, i) = 1.0 / sv(i);
  return svd.matrixV() * inv_sigma * svd.matrixU().transpose();
}

inline Matrix dense_projector(const Matrix& A) {
  return Matrix::Identity(A.cols(), A.cols()) - pseudo_inverse(A) * A;
}

inline Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix M(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) M(i, j) = normal(rng);
  return M;
}

inline Vector random_vector(std::mt19937_64& rng, int n) { return random_matrix(rng, n, 1).col(0); }

inline Vector random_positive(std::mt19937_64& rng, int n, double lo = 0.1, double hi = 3.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

struct RandomBlock {
  Matrix G, J;
  Vector c, h, s;
  ConstraintBlock block() const { return ConstraintBlock(G, J, c, h, s); }
  Matrix A() const {
    int d = static_cast<int>(G.cols()), m = static_cast<int>(G.rows()), n = static_cast<int>(J.rows());
    Matrix out = Matrix::Zero(m + n, d + n);
    out.topLeftCorner(m, d) = G;
    out.bottomLeftCorner(n, d) = J;
    out.bottomRightCorner(n, n) = s.asDiagonal();
    return out;
  }
};

inline RandomBlock random_block(std::mt19937_64& rng, int d, int m, int n) {
  RandomBlock b;
  b.G = random_matrix(rng, m, d);
  b.J = random_matrix(rng, n, d);
  b.c = random_vector(rng, m);
  b.h = random_vector(rng, n);
  b.s = random_positive(rng, n);
  return b;
}

inline Matrix random_symmetric(std::mt19937_64& rng, int n) {
  Matrix M = random_matrix(rng, n, n);
  return 0.5 * (M + M.transpose());
}

}  // namespace tripssqp::fixtures
