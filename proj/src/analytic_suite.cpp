#include "tripssqp/analytic_suite.hpp"

#include <cmath>
#include <random>

#include "tripssqp/errors.hpp"
#include "tripssqp/rng.hpp"

namespace tripssqp {
namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

// Convex quadratic with upper bounds x ≤ 1; two bounds active.
ProblemInstance quad_upper_bounds() {
  const Vector a = vec({2.0, 0.5, 2.0, 0.0, -1.0});
  ProblemInstance p;
  p.name = "quad_upper_bounds";
  p.dim_x = 5;
  p.dim_eq = 0;
  p.dim_ineq = 5;
  p.f = [a](const Vector& x) { return 0.5 * (x - a).squaredNorm(); };
  p.grad_f = [a](const Vector& x) -> Vector { return x - a; };
  p.hess_f = [](const Vector&) -> Matrix { return Matrix::Identity(5, 5); };
  p.c = [](const Vector&) { return Vector(0); };
  p.G = [](const Vector&) { return Matrix(0, 5); };
  p.h = [](const Vector& x) -> Vector { return x.array() - 1.0; };
  p.J = [](const Vector&) -> Matrix { return Matrix::Identity(5, 5); };
  p.x0 = Vector::Zero(5);
  p.known_solution = vec({1.0, 0.5, 1.0, 0.0, -1.0});
  p.known_eq_multipliers = Vector(0);
  p.known_ineq_multipliers = vec({1.0, 0.0, 1.0, 0.0, 0.0});
  return p;
}

// Bound-constrained quadratic with one linear cut (Hock–Schittkowski 21).
ProblemInstance hs21_bounds() {
  ProblemInstance p;
  p.name = "hs21_bounds";
  p.dim_x = 2;
  p.dim_eq = 0;
  p.dim_ineq = 5;
  p.f = [](const Vector& x) { return 0.01 * x[0] * x[0] + x[1] * x[1] - 100.0; };
  p.grad_f = [](const Vector& x) { return vec({0.02 * x[0], 2.0 * x[1]}); };
  p.hess_f = [](const Vector&) -> Matrix { return Vector(vec({0.02, 2.0})).asDiagonal(); };
  p.c = [](const Vector&) { return Vector(0); };
  p.G = [](const Vector&) { return Matrix(0, 2); };
  p.h = [](const Vector& x) {
    return vec({10.0 - 10.0 * x[0] + x[1], 2.0 - x[0], x[0] - 50.0, -50.0 - x[1], x[1] - 50.0});
  };
  p.J = [](const Vector&) {
    Matrix j(5, 2);
    j << -10.0, 1.0, -1.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 1.0;
    return j;
  };
  p.x0 = vec({-1.0, -1.0});
  p.known_solution = vec({2.0, 0.0});
  p.known_eq_multipliers = Vector(0);
  p.known_ineq_multipliers = vec({0.0, 0.04, 0.0, 0.0, 0.0});
  return p;
}

// Two active inequalities, one of them curved.
ProblemInstance two_active_curved() {
  ProblemInstance p;
  p.name = "two_active_curved";
  p.dim_x = 2;
  p.dim_eq = 0;
  p.dim_ineq = 2;
  p.f = [](const Vector& x) {
    return (x[0] - 2.0) * (x[0] - 2.0) + (x[1] - 1.0) * (x[1] - 1.0);
  };
  p.grad_f = [](const Vector& x) { return vec({2.0 * (x[0] - 2.0), 2.0 * (x[1] - 1.0)}); };
  p.hess_f = [](const Vector&) -> Matrix { return 2.0 * Matrix::Identity(2, 2); };
  p.c = [](const Vector&) { return Vector(0); };
  p.G = [](const Vector&) { return Matrix(0, 2); };
  p.h = [](const Vector& x) { return vec({x[0] * x[0] - x[1], x[0] + x[1] - 2.0}); };
  p.J = [](const Vector& x) {
    Matrix j(2, 2);
    j << 2.0 * x[0], -1.0, 1.0, 1.0;
    return j;
  };
  p.ineq_curvature = [](const Vector&, const Vector& w) -> Matrix {
    Matrix out = Matrix::Zero(2, 2);
    out(0, 0) = 2.0 * w[0];
    return out;
  };
  p.x0 = vec({0.5, 0.5});
  p.known_solution = vec({1.0, 1.0});
  p.known_eq_multipliers = Vector(0);
  p.known_ineq_multipliers = vec({2.0 / 3.0, 2.0 / 3.0});
  return p;
}

// Hock–Schittkowski 35.
ProblemInstance hs35() {
  ProblemInstance p;
  p.name = "hs35";
  p.dim_x = 3;
  p.dim_eq = 0;
  p.dim_ineq = 4;
  p.f = [](const Vector& x) {
    return 9.0 - 8.0 * x[0] - 6.0 * x[1] - 4.0 * x[2] + 2.0 * x[0] * x[0] + 2.0 * x[1] * x[1] +
           x[2] * x[2] + 2.0 * x[0] * x[1] + 2.0 * x[0] * x[2];
  };
  p.grad_f = [](const Vector& x) {
    return vec({-8.0 + 4.0 * x[0] + 2.0 * x[1] + 2.0 * x[2], -6.0 + 4.0 * x[1] + 2.0 * x[0],
                -4.0 + 2.0 * x[2] + 2.0 * x[0]});
  };
  p.hess_f = [](const Vector&) {
    Matrix hess(3, 3);
    hess << 4.0, 2.0, 2.0, 2.0, 4.0, 0.0, 2.0, 0.0, 2.0;
    return hess;
  };
  p.c = [](const Vector&) { return Vector(0); };
  p.G = [](const Vector&) { return Matrix(0, 3); };
  p.h = [](const Vector& x) { return vec({x[0] + x[1] + 2.0 * x[2] - 3.0, -x[0], -x[1], -x[2]}); };
  p.J = [](const Vector&) {
    Matrix j(4, 3);
    j << 1.0, 1.0, 2.0, -1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0;
    return j;
  };
  p.x0 = vec({0.5, 0.5, 0.5});
  p.known_solution = vec({4.0 / 3.0, 7.0 / 9.0, 4.0 / 9.0});
  p.known_eq_multipliers = Vector(0);
  p.known_ineq_multipliers = vec({2.0 / 9.0, 0.0, 0.0, 0.0});
  return p;
}

// Rosenbrock-type objective on the curve x₂ = x₁² (Hock–Schittkowski 6).
ProblemInstance hs6_rosenbrock_eq() {
  ProblemInstance p;
  p.name = "hs6_rosenbrock_eq";
  p.dim_x = 2;
  p.dim_eq = 1;
  p.dim_ineq = 1;
  p.f = [](const Vector& x) { return (1.0 - x[0]) * (1.0 - x[0]); };
  p.grad_f = [](const Vector& x) { return vec({-2.0 * (1.0 - x[0]), 0.0}); };
  p.hess_f = [](const Vector&) -> Matrix { return Vector(vec({2.0, 0.0})).asDiagonal(); };
  p.c = [](const Vector& x) { return vec({10.0 * (x[1] - x[0] * x[0])}); };
  p.G = [](const Vector& x) {
    Matrix g(1, 2);
    g << -20.0 * x[0], 10.0;
    return g;
  };
  p.eq_curvature = [](const Vector&, const Vector& w) -> Matrix {
    Matrix out = Matrix::Zero(2, 2);
    out(0, 0) = -20.0 * w[0];
    return out;
  };
  p.h = [](const Vector& x) { return vec({x[0] - 3.0}); };
  p.J = [](const Vector&) {
    Matrix j(1, 2);
    j << 1.0, 0.0;
    return j;
  };
  p.x0 = vec({-1.2, 1.0});
  p.known_solution = vec({1.0, 1.0});
  p.known_eq_multipliers = vec({0.0});
  p.known_ineq_multipliers = vec({0.0});
  return p;
}

// Weighted log-sum-exp on the plane Σx = 0 with lower bounds.
ProblemInstance weighted_lse_plane() {
  const Vector w = vec({1.0, 2.0, 3.0, 4.0});
  const Vector logw = w.array().log();
  ProblemInstance p;
  p.name = "weighted_lse_plane";
  p.dim_x = 4;
  p.dim_eq = 1;
  p.dim_ineq = 4;
  auto softmax = [logw](const Vector& x) -> Vector {
    Vector z = x + logw;
    Vector e = (z.array() - z.maxCoeff()).exp();
    return e / e.sum();
  };
  p.f = [logw](const Vector& x) {
    Vector z = x + logw;
    double top = z.maxCoeff();
    return top + std::log((z.array() - top).exp().sum());
  };
  p.grad_f = softmax;
  p.hess_f = [softmax](const Vector& x) -> Matrix {
    Vector q = softmax(x);
    Matrix out = -q * q.transpose();
    out.diagonal() += q;
    return out;
  };
  p.c = [](const Vector& x) { return vec({x.sum()}); };
  p.G = [](const Vector&) -> Matrix { return Matrix::Ones(1, 4); };
  p.h = [](const Vector& x) -> Vector { return -x.array() - 2.0; };
  p.J = [](const Vector&) -> Matrix { return -Matrix::Identity(4, 4); };
  p.x0 = vec({1.0, -1.0, 0.5, 0.0});
  p.known_solution = (logw.mean() - logw.array()).matrix();
  p.known_eq_multipliers = vec({-0.25});
  p.known_ineq_multipliers = Vector::Zero(4);
  return p;
}

// Linear objective over a disc; the disc constraint is active.
ProblemInstance linear_over_disc() {
  ProblemInstance p;
  p.name = "linear_over_disc";
  p.dim_x = 2;
  p.dim_eq = 0;
  p.dim_ineq = 2;
  p.f = [](const Vector& x) { return x[0] + x[1]; };
  p.grad_f = [](const Vector&) { return vec({1.0, 1.0}); };
  p.hess_f = [](const Vector&) -> Matrix { return Matrix::Zero(2, 2); };
  p.c = [](const Vector&) { return Vector(0); };
  p.G = [](const Vector&) { return Matrix(0, 2); };
  p.h = [](const Vector& x) { return vec({x.squaredNorm() - 2.0, x[0] - 5.0}); };
  p.J = [](const Vector& x) {
    Matrix j(2, 2);
    j << 2.0 * x[0], 2.0 * x[1], 1.0, 0.0;
    return j;
  };
  p.ineq_curvature = [](const Vector&, const Vector& w) -> Matrix {
    return 2.0 * w[0] * Matrix::Identity(2, 2);
  };
  p.x0 = vec({0.5, 0.2});
  p.known_solution = vec({-1.0, -1.0});
  p.known_eq_multipliers = Vector(0);
  p.known_ineq_multipliers = vec({0.5, 0.0});
  return p;
}

// ½‖x‖² on the plane Σx = 4 with an active cap on x₁.
ProblemInstance quad_plane_cap() {
  ProblemInstance p;
  p.name = "quad_plane_cap";
  p.dim_x = 4;
  p.dim_eq = 1;
  p.dim_ineq = 4;
  p.f = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  p.grad_f = [](const Vector& x) -> Vector { return x; };
  p.hess_f = [](const Vector&) -> Matrix { return Matrix::Identity(4, 4); };
  p.c = [](const Vector& x) { return vec({x.sum() - 4.0}); };
  p.G = [](const Vector&) -> Matrix { return Matrix::Ones(1, 4); };
  p.h = [](const Vector& x) { return vec({x[0] - 0.5, -x[1] - 5.0, -x[2] - 5.0, -x[3] - 5.0}); };
  p.J = [](const Vector&) {
    Matrix j = -Matrix::Identity(4, 4);
    j(0, 0) = 1.0;
    return j;
  };
  p.x0 = Vector::Zero(4);
  p.known_solution = vec({0.5, 7.0 / 6.0, 7.0 / 6.0, 7.0 / 6.0});
  p.known_eq_multipliers = vec({-7.0 / 6.0});
  p.known_ineq_multipliers = vec({2.0 / 3.0, 0.0, 0.0, 0.0});
  return p;
}

// Strictly convex QP in 20 variables. The data are generated from a fixed
// stream so that a chosen (x*, λ*, τ*) is an exact KKT triple.
ProblemInstance random_qp() {
  constexpr int d = 20, m = 5, n = 10, active = 3;
  std::mt19937_64 rng(hash_key({0x51505f7375697465ULL}));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.5, 1.5);
  auto draw = [&](int rows, int cols) {
    Matrix out(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) out(i, j) = normal(rng);
    return out;
  };
  Matrix M = draw(d, d);
  Matrix B = M.transpose() * M / d + Matrix::Identity(d, d);
  Matrix C = draw(m, d);
  Vector xstar = draw(d, 1);
  Vector lambda = draw(m, 1);
  Vector tau = Vector::Zero(n);
  Vector upper(n);
  for (int i = 0; i < n; ++i) {
    if (i < active) {
      upper[i] = xstar[i];
      tau[i] = uniform(rng);
    } else {
      upper[i] = xstar[i] + 1.0;
    }
  }
  Matrix Jm = Matrix::Zero(n, d);
  for (int i = 0; i < n; ++i) Jm(i, i) = 1.0;
  Vector b = C * xstar;
  Vector q = -(B * xstar + C.transpose() * lambda + Jm.transpose() * tau);

  ProblemInstance p;
  p.name = "random_qp";
  p.dim_x = d;
  p.dim_eq = m;
  p.dim_ineq = n;
  p.f = [B, q](const Vector& x) { return 0.5 * x.dot(B * x) + q.dot(x); };
  p.grad_f = [B, q](const Vector& x) -> Vector { return B * x + q; };
  p.hess_f = [B](const Vector&) -> Matrix { return B; };
  p.c = [C, b](const Vector& x) -> Vector { return C * x - b; };
  p.G = [C](const Vector&) -> Matrix { return C; };
  p.h = [upper](const Vector& x) -> Vector { return x.head(n) - upper; };
  p.J = [Jm](const Vector&) -> Matrix { return Jm; };
  p.x0 = Vector::Zero(d);
  p.known_solution = xstar;
  p.known_eq_multipliers = lambda;
  p.known_ineq_multipliers = tau;
  return p;
}

// aᵀx + ½‖x‖² on the unit sphere with inactive lower bounds.
ProblemInstance sphere_eq() {
  const Vector a = vec({1.0, 2.0, 2.0});
  ProblemInstance p;
  p.name = "sphere_eq";
  p.dim_x = 3;
  p.dim_eq = 1;
  p.dim_ineq = 3;
  p.f = [a](const Vector& x) { return a.dot(x) + 0.5 * x.squaredNorm(); };
  p.grad_f = [a](const Vector& x) -> Vector { return a + x; };
  p.hess_f = [](const Vector&) -> Matrix { return Matrix::Identity(3, 3); };
  p.c = [](const Vector& x) { return vec({x.squaredNorm() - 1.0}); };
  p.G = [](const Vector& x) -> Matrix { return 2.0 * x.transpose(); };
  p.eq_curvature = [](const Vector&, const Vector& w) -> Matrix {
    return 2.0 * w[0] * Matrix::Identity(3, 3);
  };
  p.h = [](const Vector& x) -> Vector { return -x.array() - 2.0; };
  p.J = [](const Vector&) -> Matrix { return -Matrix::Identity(3, 3); };
  p.x0 = vec({0.5, -0.8, 0.1});
  p.known_solution = -a / 3.0;
  p.known_eq_multipliers = vec({1.0});
  p.known_ineq_multipliers = Vector::Zero(3);
  return p;
}

ProblemInstance canonical(int index) {
  switch (index) {
    case 0: return quad_upper_bounds();
    case 1: return hs21_bounds();
    case 2: return two_active_curved();
    case 3: return hs35();
    case 4: return hs6_rosenbrock_eq();
    case 5: return weighted_lse_plane();
    case 6: return linear_over_disc();
    case 7: return quad_plane_cap();
    case 8: return random_qp();
    default: return sphere_eq();
  }
}

}  // namespace

std::vector<ProblemInstance> make_analytic_suite(int count, std::uint64_t seed) {
  if (count < 1) throw ConfigError("make_analytic_suite: count must be at least 1");
  std::vector<ProblemInstance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    ProblemInstance p = canonical(i % kAnalyticSuiteSize);
    if (seed != 0 || i >= kAnalyticSuiteSize) {
      std::mt19937_64 rng(hash_key({seed, static_cast<std::uint64_t>(i)}));
      std::uniform_real_distribution<double> jitter(-0.1, 0.1);
      for (Eigen::Index j = 0; j < p.x0.size(); ++j) p.x0[j] += jitter(rng) * (1.0 + std::abs(p.x0[j]));
      p.name += "#" + std::to_string(i);
    }
    out.push_back(std::move(p));
  }
  return out;
}

ProblemInstance analytic_problem(const std::string& name) {
  for (int i = 0; i < kAnalyticSuiteSize; ++i) {
    ProblemInstance p = canonical(i);
    if (p.name == name) return p;
  }
  throw ConfigError("unknown analytic problem: " + name);
}

}  // namespace tripssqp
