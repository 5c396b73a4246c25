#include "tripssqp/kkt.hpp"

#include <algorithm>

#include "tripssqp/errors.hpp"

namespace tripssqp {

ConstraintBlock::ConstraintBlock(const Matrix& G, const Matrix& J, const Vector& c, const Vector& h,
                                 const Vector& s)
    : dim_x_(static_cast<int>(J.cols())),
      dim_eq_(static_cast<int>(G.rows())),
      dim_ineq_(static_cast<int>(J.rows())),
      slack_(s) {
  if ((s.array() <= 0.0).any()) throw DomainError("slack variables must be positive");
  const int rows = dim_eq_ + dim_ineq_;
  A_ = Matrix::Zero(rows, dim_x_ + dim_ineq_);
  if (dim_eq_ > 0) A_.topLeftCorner(dim_eq_, dim_x_) = G;
  A_.bottomLeftCorner(dim_ineq_, dim_x_) = J;
  A_.bottomRightCorner(dim_ineq_, dim_ineq_) = s.asDiagonal();

  residual_.resize(rows);
  residual_.head(dim_eq_) = c;
  residual_.tail(dim_ineq_) = h + s;

  Matrix AAt = Matrix::Zero(rows, rows);
  AAt.selfadjointView<Eigen::Lower>().rankUpdate(A_);
  chol_.compute(AAt);
  if (chol_.info() != Eigen::Success) throw SingularConstraintError("A·Aᵀ is not positive definite");
  Vector pivots = chol_.matrixLLT().diagonal().array().square();
  if (pivots.minCoeff() <= 1e-12 * pivots.maxCoeff())
    throw SingularConstraintError("A·Aᵀ is numerically singular");
}

Vector ConstraintBlock::solve_normal(const Vector& y) const { return chol_.solve(y); }

Vector ConstraintBlock::project(const Vector& v) const {
  Vector out = v;
  out.noalias() -= A_.transpose() * chol_.solve(A_ * v);
  return out;
}

ConstraintBlock build_block(const ProblemInstance& problem, const Vector& x, const Vector& s) {
  return ConstraintBlock(problem.G(x), problem.J(x), problem.c(x), problem.h(x), s);
}

Vector project_nullspace(const ConstraintBlock& block, const Vector& v) { return block.project(v); }

Multipliers multipliers_for_gradient(const Matrix& G, const Matrix& J, const Vector& s, double theta,
                                     const Vector& grad) {
  Multipliers out;
  out.tau = theta * s.cwiseInverse();
  if (G.rows() == 0) {
    out.lambda = Vector(0);
    return out;
  }
  Matrix GGt = G * G.transpose();
  Eigen::LLT<Matrix> chol(GGt);
  if (chol.info() != Eigen::Success) throw SingularConstraintError("G·Gᵀ is not positive definite");
  Vector pivots = chol.matrixLLT().diagonal().array().square();
  if (pivots.minCoeff() <= 1e-12 * pivots.maxCoeff())
    throw SingularConstraintError("G·Gᵀ is numerically singular");
  out.lambda = -chol.solve(G * (grad + J.transpose() * out.tau));
  return out;
}

Multipliers true_multipliers(const ProblemInstance& problem, const Vector& x, const Vector& s, double theta) {
  return multipliers_for_gradient(problem.G(x), problem.J(x), s, theta, problem.grad_f(x));
}

Vector barrier_gradient(const Vector& grad, double theta, int dim_ineq) {
  Vector psi(grad.size() + dim_ineq);
  psi.head(grad.size()) = grad;
  psi.tail(dim_ineq).setConstant(-theta);
  return psi;
}

Vector stationarity_measure(const ConstraintBlock& block, const Vector& psi) {
  Vector q(block.dim_step() + block.residual().size());
  q.head(block.dim_step()) = block.project(psi);
  q.tail(block.residual().size()) = block.residual();
  return q;
}

double kkt_residual_norm(const ProblemInstance& problem, const Vector& x, const Vector& s, double theta,
                         const Vector& grad) {
  const Matrix G = problem.G(x);
  const Matrix J = problem.J(x);
  Multipliers mult = multipliers_for_gradient(G, J, s, theta, grad);
  Vector stationarity = grad + J.transpose() * mult.tau;
  if (problem.dim_eq > 0) stationarity.noalias() += G.transpose() * mult.lambda;
  Vector complementarity = (-problem.h(x)).cwiseMin(mult.tau);
  double sq = stationarity.squaredNorm() + complementarity.squaredNorm();
  if (problem.dim_eq > 0) sq += problem.c(x).squaredNorm();
  return std::sqrt(sq);
}

double kkt_residual_norm(const ProblemInstance& problem, const Vector& x, const Vector& s, double theta) {
  return kkt_residual_norm(problem, x, s, theta, problem.grad_f(x));
}

double kkt_reference_scale(const ProblemInstance& problem, const Vector& x0, const Vector& s0, double theta0) {
  return std::max(kkt_residual_norm(problem, x0, s0, theta0), 1.0);
}

double relative_kkt_residual(const ProblemInstance& problem, const Vector& x, const Vector& s, double theta,
                             double ref_scale) {
  return kkt_residual_norm(problem, x, s, theta) / std::max(ref_scale, 1.0);
}

}  // namespace tripssqp
