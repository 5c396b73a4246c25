#include "tripssqp/step.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tripssqp {
namespace {

// Largest τ ≥ 0 with ‖t + τp‖ = radius (t inside the ball).
double boundary_step(const Vector& t, const Vector& p, double radius) {
  double a = p.squaredNorm();
  double b = t.dot(p);
  double c = t.squaredNorm() - radius * radius;
  if (a == 0.0) return 0.0;
  double disc = std::sqrt(std::max(b * b - a * c, 0.0));
  // Stable root of aτ² + 2bτ + c = 0.
  return b > 0.0 ? -c / (b + disc) : (disc - b) / a;
}

}  // namespace

Vector StepResult::d_tilde() const {
  Vector d(dx.size() + ds_tilde.size());
  d << dx, ds_tilde;
  return d;
}

Vector normal_step(const ConstraintBlock& block) {
  return -block.A().transpose() * block.solve_normal(block.residual());
}

double normal_scaling(const Vector& v, const Vector& v_slack, double delta, double zeta, double eps_s) {
  double gamma = 1.0;
  double vs = v_slack.norm();
  double vn = v.norm();
  if (vs > 0.0) gamma = std::min(gamma, zeta * eps_s / vs);
  if (vn > 0.0) gamma = std::min(gamma, zeta * delta / vn);
  return gamma;
}

double tangential_model(const BarrierHessian& W, const Vector& rhs, const Vector& t) {
  return 0.5 * W.quadratic(t) + rhs.dot(t);
}

CauchyPoint cauchy_point(const ConstraintBlock& block, const BarrierHessian& W, const Vector& rhs,
                         double radius) {
  CauchyPoint out;
  Vector g = block.project(block.project(rhs));
  double gnorm = g.norm();
  if (gnorm == 0.0 || radius <= 0.0) {
    out.step = Vector::Zero(rhs.size());
    return out;
  }
  double curvature = W.quadratic(g);
  double alpha_max = radius / gnorm;
  double alpha = curvature > 0.0 ? std::min(gnorm * gnorm / curvature, alpha_max) : alpha_max;
  out.step = block.project(-alpha * g);
  out.decrease = tangential_model(W, rhs, out.step);
  return out;
}

TangentialStep tangential_step(const ConstraintBlock& block, const BarrierHessian& W, const Vector& rhs,
                               double delta_hat, double eps_s, const Vector& w_slack, double kappa_fcd) {
  const int dim = block.dim_step();
  const int d = block.dim_x();
  const int n = block.dim_ineq();
  TangentialStep out;
  out.step = Vector::Zero(dim);
  if (delta_hat <= 0.0) return out;

  Vector r = rhs;
  Vector g = block.project(r);
  ++out.projections;
  double gg = g.squaredNorm();
  if (gg == 0.0) return out;

  const double tolerance = 1e-10 * std::sqrt(gg);
  const int cap = std::max(1, dim - block.dim_eq());
  Vector t = Vector::Zero(dim);
  Vector p = -g;
  out.stop = CgStop::iteration_cap;
  for (int it = 0; it < cap; ++it) {
    ++out.cg_iterations;
    Vector Wp = W.apply(p);
    ++out.w_applies;
    double curvature = p.dot(Wp);
    if (curvature <= 0.0) {
      t += boundary_step(t, p, delta_hat) * p;
      out.stop = CgStop::negative_curvature;
      break;
    }
    double alpha = gg / curvature;
    if ((t + alpha * p).norm() >= delta_hat) {
      t += boundary_step(t, p, delta_hat) * p;
      out.stop = CgStop::boundary;
      break;
    }
    t += alpha * p;
    r += alpha * Wp;
    g = block.project(r);
    ++out.projections;
    double gg_next = g.squaredNorm();
    if (std::sqrt(gg_next) <= tolerance) {
      out.stop = CgStop::converged;
      break;
    }
    p = block.project(-g + (gg_next / gg) * p);
    ++out.projections;
    gg = gg_next;
  }
  t = block.project(t);
  ++out.projections;

  // Fraction-to-boundary: tˢ ≥ −ε_s𝟙 − w̃ˢ.
  double scale = 1.0;
  for (int i = 0; i < n; ++i) {
    double ti = t[d + i];
    double bound = -eps_s - w_slack[i];
    if (ti < bound) scale = std::min(scale, bound / ti);
  }
  if (scale < 1.0) t *= scale;
  out.boundary_scale = scale;

  out.cauchy_radius = std::min(delta_hat, eps_s - w_slack.norm());
  CauchyPoint cauchy = cauchy_point(block, W, rhs, out.cauchy_radius);
  out.projections += 3;
  out.w_applies += 2;
  out.cauchy_decrease = cauchy.decrease;

  out.decrease = tangential_model(W, rhs, t);
  ++out.w_applies;
  if (!(out.decrease <= kappa_fcd * cauchy.decrease)) {
    t = std::move(cauchy.step);
    out.decrease = cauchy.decrease;
    out.used_cauchy = true;
  }
  out.step = std::move(t);
  return out;
}

Vector slack_update(const Vector& s, const StepResult& step, double eps_s) {
  Vector out = s + step.ds(s);
  const double floor = 1.0 - eps_s;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] / s[i] >= floor) continue;
    out[i] = floor * s[i];
    while (out[i] / s[i] < floor) out[i] = std::nextafter(out[i], std::numeric_limits<double>::infinity());
  }
  return out;
}

StepResult assemble_step(const Vector& v, double gamma_bar, const TangentialStep& tangential, int dim_x) {
  StepResult out;
  out.gamma_bar = gamma_bar;
  out.w_tilde = gamma_bar * v;
  out.t_tilde = tangential.step;
  Vector d = out.w_tilde + out.t_tilde;
  out.dx = d.head(dim_x);
  out.ds_tilde = d.tail(d.size() - dim_x);
  out.tangential_decrease = tangential.decrease;
  out.cauchy_decrease = tangential.cauchy_decrease;
  out.used_cauchy = tangential.used_cauchy;
  out.cg_iterations = tangential.cg_iterations;
  out.w_applies = tangential.w_applies;
  out.projections = tangential.projections;
  return out;
}

StepResult compute_step(const ConstraintBlock& block, const BarrierHessian& W, const Vector& psi_bar,
                        double delta, const StepParams& params) {
  const int d = block.dim_x();
  const int n = block.dim_ineq();
  Vector v = normal_step(block);
  double gamma = normal_scaling(v, v.tail(n), delta, params.zeta, params.eps_s);
  Vector w = gamma * v;
  double delta_hat = std::sqrt(std::max(delta * delta - w.squaredNorm(), 0.0));
  Vector rhs = psi_bar + gamma * W.apply(v);
  TangentialStep t = tangential_step(block, W, rhs, delta_hat, params.eps_s, w.tail(n), params.kappa_fcd);
  StepResult out = assemble_step(v, gamma, t, d);
  out.tangential_radius = delta_hat;
  out.w_applies += 1;
  return out;
}

}  // namespace tripssqp
