#pragma once

#include <Eigen/Dense>

namespace hamfault {

/// One classic fourth-order Runge-Kutta step of x' = f(x).
template <typename Field>
Eigen::VectorXd rk4_step(const Field& f, const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd k1 = f(x);
  const Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
  const Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
  const Eigen::VectorXd k4 = f(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace hamfault
