#include "tripssqp/hessian.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "tripssqp/errors.hpp"

namespace tripssqp {

std::string to_string(HessianKind kind) {
  switch (kind) {
    case HessianKind::identity: return "Id";
    case HessianKind::sr1: return "SR1";
    case HessianKind::estimated: return "EstH";
    case HessianKind::averaged: return "AveH";
  }
  return "?";
}

HessianKind parse_hessian_kind(const std::string& text) {
  std::string t;
  for (char ch : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (t == "id" || t == "identity") return HessianKind::identity;
  if (t == "sr1") return HessianKind::sr1;
  if (t == "esth" || t == "estimated") return HessianKind::estimated;
  if (t == "aveh" || t == "averaged") return HessianKind::averaged;
  throw ConfigError("unknown Hessian kind: " + text);
}

namespace {

double spectral_norm(const Matrix& H) {
  if (H.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_identity(const Matrix& H) { return H.isIdentity(0.0); }

}  // namespace

BarrierHessian::BarrierHessian(Matrix H, double theta, int dim_ineq)
    : H_(std::move(H)),
      theta_(theta),
      dim_ineq_(dim_ineq),
      hessian_norm_(is_identity(H_) ? 1.0 : spectral_norm(H_)),
      norm_(std::max(hessian_norm_, theta)) {}

Vector BarrierHessian::apply(const Vector& v) const {
  const auto d = H_.rows();
  Vector out(v.size());
  out.head(d).noalias() = H_ * v.head(d);
  out.tail(dim_ineq_) = theta_ * v.tail(dim_ineq_);
  return out;
}

BarrierHessian assemble_W(Matrix H, double theta, int dim_ineq) {
  return BarrierHessian(std::move(H), theta, dim_ineq);
}

bool HessianModel::sr1_update(Matrix& H, const Vector& dx, const Vector& y) {
  Vector r = y - H * dx;
  double denom = r.dot(dx);
  if (!(std::abs(denom) >= kSr1SkipTolerance * r.norm() * dx.norm()) || r.norm() == 0.0) return false;
  H.noalias() += r * r.transpose() / denom;
  H = 0.5 * (H + H.transpose()).eval();
  return true;
}

Matrix HessianModel::sampled_lagrangian_hessian(const HessianInputs& in) const {
  Multipliers mult = multipliers_for_gradient(*in.G, *in.J, *in.s, in.theta, *in.g_bar);
  Matrix H = in.oracle->hessian(*in.x, in.iteration);
  H += in.problem->constraint_curvature(*in.x, mult.lambda, mult.tau);
  return 0.5 * (H + H.transpose());
}

Matrix HessianModel::build(const HessianInputs& in) {
  const int d = in.problem->dim_x;
  switch (kind_) {
    case HessianKind::identity:
      return Matrix::Identity(d, d);

    case HessianKind::sr1: {
      Multipliers mult = multipliers_for_gradient(*in.G, *in.J, *in.s, in.theta, *in.g_bar);
      Vector grad_lag = *in.g_bar + in.J->transpose() * mult.tau;
      if (in.problem->dim_eq > 0) grad_lag.noalias() += in.G->transpose() * mult.lambda;
      if (!sr1_H_) sr1_H_ = Matrix::Identity(d, d);
      if (sr1_x_ && *sr1_x_ != *in.x) {
        if (sr1_update(*sr1_H_, *in.x - *sr1_x_, grad_lag - *sr1_grad_)) {
          ++sr1_updates_;
        } else {
          ++sr1_skips_;
        }
      }
      sr1_x_ = *in.x;
      sr1_grad_ = std::move(grad_lag);
      return *sr1_H_;
    }

    case HessianKind::estimated:
      return sampled_lagrangian_hessian(in);

    case HessianKind::averaged: {
      window_.push_back(sampled_lagrangian_hessian(in));
      if (static_cast<int>(window_.size()) > kAverageWindow) window_.pop_front();
      Matrix mean = Matrix::Zero(d, d);
      for (const Matrix& sample : window_) mean += sample;
      mean /= static_cast<double>(window_.size());
      return 0.5 * (mean + mean.transpose());
    }
  }
  return Matrix::Identity(d, d);
}

}  // namespace tripssqp
