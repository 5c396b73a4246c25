#pragma once

#include <Eigen/Core>

namespace tripssqp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace tripssqp
