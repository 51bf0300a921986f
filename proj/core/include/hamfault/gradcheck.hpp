#pragma once

#include <Eigen/Dense>

#include <functional>

namespace hamfault {

/// Central finite-difference gradient of a scalar function.
Eigen::VectorXd finite_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                           const Eigen::VectorXd& x, double h = 1e-5);

/// ||a - b|| / max(||a||, ||b||); zero when both vectors are zero.
double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace hamfault
