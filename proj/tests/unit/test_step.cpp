#include <gtest/gtest.h>

#include <Eigen/LU>

#include "support.hpp"
#include "tripssqp/errors.hpp"
#include "tripssqp/step.hpp"

using namespace tripssqp;
using fixtures::random_block;

namespace {

// Equality-constrained minimizer of ½tᵀWt + rhsᵀt over At = 0 from the dense KKT system.
Vector dense_reduced_solution(const Matrix& W, const Matrix& A, const Vector& rhs) {
  const auto k = W.rows(), r = A.rows();
  Matrix K = Matrix::Zero(k + r, k + r);
  K.topLeftCorner(k, k) = W;
  K.topRightCorner(k, r) = A.transpose();
  K.bottomLeftCorner(r, k) = A;
  Vector b = Vector::Zero(k + r);
  b.head(k) = -rhs;
  return K.fullPivLu().solve(b).head(k);
}

Matrix dense_W(const BarrierHessian& W) {
  const int d = W.dim_x(), n = W.dim_ineq();
  Matrix out = Matrix::Zero(d + n, d + n);
  out.topLeftCorner(d, d) = W.H();
  out.bottomRightCorner(n, n) = W.theta() * Matrix::Identity(n, n);
  return out;
}

Matrix random_spd(std::mt19937_64& rng, int n) {
  Matrix M = fixtures::random_matrix(rng, n, n);
  return M * M.transpose() + 0.5 * Matrix::Identity(n, n);
}

}  // namespace

TEST(NormalStep, ZeroResidualGivesZeroStep) {
  std::mt19937_64 rng(1);
  auto rb = random_block(rng, 4, 1, 2);
  rb.c.setZero();
  rb.h = -rb.s;
  EXPECT_LE(normal_step(rb.block()).norm(), 0.0);
}

TEST(NormalStep, IdentityConstraintMatrix) {
  // G = [1 0], J = [0 0], s = 1 → A = [1 0 0; 0 0 1]; on the (x₁, s) coordinates A = I.
  Matrix G(1, 1), J(1, 1);
  G << 1.0;
  J << 0.0;
  ConstraintBlock block(G, J, Vector::Constant(1, 0.7), Vector::Constant(1, -0.2), Vector::Ones(1));
  Vector v = normal_step(block);
  EXPECT_NEAR(v[0], -0.7, 1e-15);
  EXPECT_NEAR(v[1], -0.8, 1e-15);
}

TEST(NormalStep, MatchesPseudoInverseOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    int d = 3 + trial % 4, m = trial % 3, n = 1 + trial % 2;
    auto rb = random_block(rng, d, m, n);
    ConstraintBlock block = rb.block();
    Vector v = normal_step(block);
    Vector oracle = -fixtures::pseudo_inverse(rb.A()) * block.residual();
    EXPECT_LE((v - oracle).norm(), 1e-10 * std::max(1.0, oracle.norm()));
    EXPECT_LE((block.residual() + block.A() * v).norm(), 1e-10 * std::max(1.0, block.residual().norm()));
  }
}

TEST(NormalScaling, Examples) {
  Vector v = Vector::Zero(4);
  v[0] = 4.0;
  Vector vs = Vector::Zero(2);
  vs[0] = 2.0;
  EXPECT_DOUBLE_EQ(normal_scaling(v, vs, 1.0, 0.5, 0.9), 0.125);
  EXPECT_DOUBLE_EQ(normal_scaling(Vector::Zero(4), Vector::Zero(2), 1.0, 0.5, 0.9), 1.0);
  EXPECT_DOUBLE_EQ(normal_scaling(v, Vector::Zero(2), 100.0, 0.5, 0.9), 1.0);
  EXPECT_DOUBLE_EQ(normal_scaling(v, vs, 100.0, 0.5, 0.9), 0.225);
}

TEST(CauchyPoint, UnitCurvatureExample) {
  // W = I, ‖P·rhs‖ = 1, radius 2: α = 1, m = ½ − 1.
  Matrix G0(0, 2);
  Matrix J(1, 2);
  J << 1.0, 0.0;
  ConstraintBlock block(G0, J, Vector(0), Vector::Constant(1, -1.0), Vector::Ones(1));
  BarrierHessian W = assemble_W(Matrix::Identity(2, 2), 1.0, 1);
  Vector rhs(3);
  rhs << 0.0, 1.0, 0.0;
  CauchyPoint cp = cauchy_point(block, W, rhs, 2.0);
  EXPECT_NEAR(cp.decrease, -0.5, 1e-15);
  EXPECT_NEAR(cp.step.norm(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(cauchy_point(block, W, rhs, 0.25).step.norm(), 0.25);
}

TEST(CauchyPoint, MatchesGridSearch) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 6; ++trial) {
    auto rb = random_block(rng, 3, 1, 2);
    ConstraintBlock block = rb.block();
    Matrix H = trial % 2 ? fixtures::random_symmetric(rng, 3) : random_spd(rng, 3);
    BarrierHessian W = assemble_W(H, 0.3, 2);
    Vector rhs = fixtures::random_vector(rng, 5);
    double radius = 0.2 + trial;
    CauchyPoint cp = cauchy_point(block, W, rhs, radius);
    Vector g = fixtures::dense_projector(rb.A()) * rhs;
    double amax = radius / g.norm();
    const int points = 1000000;
    double best = 0.0;
    for (int i = 0; i <= points; ++i) {
      double a = amax * i / points;
      best = std::min(best, tangential_model(W, rhs, -a * g));
    }
    EXPECT_NEAR(cp.decrease, best, 1e-6) << trial;
    EXPECT_LE(cp.decrease, best + 1e-12);
    EXPECT_LE(cp.decrease, -0.5 * g.norm() * std::min(radius, g.norm() / W.norm()) + 1e-12);
  }
}

TEST(TangentialStep, ProjectedCgMatchesDenseReducedKkt) {
  std::mt19937_64 rng(4);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int d = 2 + trial % 3, n = 1 + trial % 2, m = trial % 2;
    if (d + n > 6) continue;
    auto rb = random_block(rng, d, m, n);
    ConstraintBlock block = rb.block();
    BarrierHessian W = assemble_W(random_spd(rng, d), 0.5, n);
    Vector rhs = fixtures::random_vector(rng, d + n);
    Vector oracle = dense_reduced_solution(dense_W(W), rb.A(), rhs);
    TangentialStep t = tangential_step(block, W, rhs, 1e6, 1e6, Vector::Zero(n), 1.0);
    // A one-dimensional null space makes the Cauchy point the minimizer itself.
    if (t.used_cauchy) EXPECT_EQ(d - m, 1);
    EXPECT_EQ(t.boundary_scale, 1.0);
    EXPECT_LE((t.step - oracle).norm(), 1e-8 * std::max(1.0, oracle.norm())) << trial;
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(TangentialStep, NegativeCurvatureReachesBoundary) {
  Matrix G0(0, 3);
  Matrix J = Matrix::Zero(1, 3);
  J(0, 2) = 1.0;
  ConstraintBlock block(G0, J, Vector(0), Vector::Constant(1, -1.0), Vector::Ones(1));
  BarrierHessian W = assemble_W(-Matrix::Identity(3, 3), 0.1, 1);
  Vector rhs(4);
  rhs << 1.0, 0.5, 0.0, 0.0;
  TangentialStep t = tangential_step(block, W, rhs, 0.7, 10.0, Vector::Zero(1), 1.0);
  EXPECT_EQ(t.stop, CgStop::negative_curvature);
  EXPECT_NEAR(t.step.norm(), 0.7, 1e-12);
  EXPECT_LT(t.decrease, 0.0);
}

TEST(TangentialStep, ZeroProjectedGradientGivesZeroStep) {
  std::mt19937_64 rng(5);
  auto rb = random_block(rng, 4, 1, 2);
  ConstraintBlock block = rb.block();
  Vector rhs = rb.A().transpose() * fixtures::random_vector(rng, 3);
  TangentialStep t = tangential_step(block, assemble_W(Matrix::Identity(4, 4), 1.0, 2), rhs, 1.0, 0.9,
                                     Vector::Zero(2), 1.0);
  EXPECT_LE(t.step.norm(), 1e-10 * rhs.norm());
}

TEST(ComputeStep, InvariantsOnRandomInstances) {
  std::mt19937_64 rng(6);
  StepParams params;
  for (int trial = 0; trial < 500; ++trial) {
    int d = 2 + trial % 5, m = trial % 2, n = 1 + trial % 3;
    auto rb = random_block(rng, d, m, n);
    ConstraintBlock block = rb.block();
    Matrix H = trial % 3 == 0 ? fixtures::random_symmetric(rng, d) : random_spd(rng, d);
    BarrierHessian W = assemble_W(H, 0.05 + 0.1 * (trial % 4), n);
    Vector psi = barrier_gradient(fixtures::random_vector(rng, d), W.theta(), n);
    double delta = std::exp(-3.0 + 6.0 * (trial % 11) / 10.0);
    StepResult step = compute_step(block, W, psi, delta, params);
    Vector dt = step.d_tilde();
    Vector v = normal_step(block);

    EXPECT_LE(dt.norm(), delta + 1e-12);
    EXPECT_GE(step.ds_tilde.minCoeff(), -params.eps_s - 1e-12);
    EXPECT_LE((block.A() * step.t_tilde).norm(), 1e-9 * std::max(step.t_tilde.norm(), 1e-300) + 1e-15);
    EXPECT_LE((step.w_tilde - step.gamma_bar * v).norm(), 0.0);
    EXPECT_LE(std::abs(step.w_tilde.dot(step.t_tilde)), 1e-9 * (1 + step.w_tilde.norm() * step.t_tilde.norm()));
    EXPECT_LE((dt - step.w_tilde - step.t_tilde).norm(), 1e-15 * (1 + dt.norm()));
    EXPECT_GT(step.gamma_bar, 0.0);
    EXPECT_LE(step.gamma_bar, 1.0);
    EXPECT_LE(step.tangential_decrease, params.kappa_fcd * step.cauchy_decrease);
    EXPECT_LE(step.cauchy_decrease, 0.0);
    double lin = (block.residual() + block.A() * dt).norm();
    double expected = (1.0 - step.gamma_bar) * block.residual().norm();
    EXPECT_LE(std::abs(lin - expected), 1e-9 * std::max(1.0, block.residual().norm()));
  }
}

TEST(ComputeStep, FractionToBoundaryTruncatesSlackStep) {
  // One inequality whose slack step would overshoot −ε_s.
  Matrix G0(0, 1);
  Matrix J(1, 1);
  J << 1.0;
  ConstraintBlock block(G0, J, Vector(0), Vector::Constant(1, -1.0), Vector::Ones(1));
  BarrierHessian W = assemble_W(Matrix::Identity(1, 1), 1e-6, 1);
  Vector psi(2);
  psi << 0.0, 50.0;
  StepResult step = compute_step(block, W, psi, 10.0, {});
  EXPECT_GE(step.ds_tilde[0], -0.9 - 1e-12);
}
