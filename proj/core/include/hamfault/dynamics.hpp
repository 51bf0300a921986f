#pragma once

#include "hamfault/hnn.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace hamfault {

/// One-degree-of-freedom oscillator m q'' + c q' + k q = 0 with c = 2 zeta sqrt(m k).
/// Momentum is p = m q'.
struct SimConfig {
  double mass = 1.0;           // kg
  double stiffness = 1.0;      // N/m
  double damping_ratio = 0.0;  // zeta, dimensionless
  double q0 = 1.0;
  double p0 = 0.0;
  double dt = 0.01;            // s, sample spacing
  double duration = 20.0;      // s
  double noise_std = 0.0;      // Gaussian observation noise on states and rates
  std::uint64_t seed = 0;
  double integration_step = 1e-3;  // s, upper bound on the internal RK4 step

  void validate() const;
  std::size_t sample_count() const;
};

struct SimResult {
  std::vector<double> times;
  Eigen::MatrixXd trajectory;  // 2 x N clean states [q; p]
  TrainingPairs pairs;         // observed states and rates (noise applied)
};

/// Closed-form undamped solution; the damping ratio is ignored.
SimResult simulate_mass_spring(const SimConfig& cfg);

/// RK4 integration of the damped oscillator at a step no larger than
/// cfg.integration_step; rates come from the ODE right-hand side.
SimResult simulate_mass_spring_damper(const SimConfig& cfg);

/// p^2 / 2m + k q^2 / 2
double mechanical_energy(const SimConfig& cfg, double q, double p);

}  // namespace hamfault
