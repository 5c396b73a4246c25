#include "tripssqp/problem.hpp"

#include <algorithm>
#include <cmath>

#include "tripssqp/errors.hpp"

namespace tripssqp {

Matrix ProblemInstance::constraint_curvature(const Vector& x, const Vector& lambda,
                                             const Vector& tau) const {
  Matrix out = Matrix::Zero(dim_x, dim_x);
  if (dim_eq > 0 && eq_curvature) out += eq_curvature(x, lambda);
  if (dim_ineq > 0 && ineq_curvature) out += ineq_curvature(x, tau);
  return out;
}

void ProblemInstance::validate() const {
  if (dim_x < 1) throw ConfigError(name + ": dim_x must be at least 1");
  if (dim_eq < 0) throw ConfigError(name + ": dim_eq must be non-negative");
  if (dim_ineq < 1) throw ConfigError(name + ": at least one inequality is required");
  if (dim_eq >= dim_x) throw ConfigError(name + ": need dim_eq < dim_x");
  if (!f || !grad_f || !c || !G || !h || !J) throw ConfigError(name + ": missing evaluator");
  if (x0.size() != dim_x) throw ConfigError(name + ": x0 has wrong dimension");
}

double DerivativeCheck::worst() const {
  return std::max({grad_error, eq_jacobian_error, ineq_jacobian_error});
}

namespace {

double relative_gap(const Matrix& analytic, const Matrix& numeric) {
  if (analytic.size() == 0) return 0.0;
  double scale = std::max(1.0, numeric.cwiseAbs().maxCoeff());
  return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

// Column j of the returned matrix is the central difference of fn along eⱼ.
template <typename Fn>
Matrix central_jacobian(Fn&& fn, const Vector& x, int rows) {
  Matrix out(rows, x.size());
  Vector xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    double step = 1e-6 * (1.0 + std::abs(x[j]));
    xp[j] = x[j] + step;
    Vector hi = fn(xp);
    xp[j] = x[j] - step;
    Vector lo = fn(xp);
    xp[j] = x[j];
    out.col(j) = (hi - lo) / (2.0 * step);
  }
  return out;
}

}  // namespace

DerivativeCheck check_derivatives(const ProblemInstance& p, const Vector& x) {
  DerivativeCheck out;
  auto f_as_vec = [&](const Vector& z) { return Vector::Constant(1, p.f(z)); };
  Matrix fd_grad = central_jacobian(f_as_vec, x, 1);
  out.grad_error = relative_gap(p.grad_f(x).transpose(), fd_grad);
  if (p.dim_eq > 0) out.eq_jacobian_error = relative_gap(p.G(x), central_jacobian(p.c, x, p.dim_eq));
  out.ineq_jacobian_error = relative_gap(p.J(x), central_jacobian(p.h, x, p.dim_ineq));
  return out;
}

}  // namespace tripssqp
