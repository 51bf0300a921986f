#include "hamfault/dynamics.hpp"

#include "hamfault/ode.hpp"
#include "hamfault/random.hpp"

#include <cmath>
#include <stdexcept>

namespace hamfault {

void SimConfig::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("SimConfig: mass must be positive");
  if (!(stiffness > 0.0)) throw std::invalid_argument("SimConfig: stiffness must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be positive");
  if (!(duration > 0.0)) throw std::invalid_argument("SimConfig: duration must be positive");
  if (!(damping_ratio >= 0.0)) throw std::invalid_argument("SimConfig: damping ratio must be >= 0");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("SimConfig: noise_std must be >= 0");
  if (!(integration_step > 0.0)) throw std::invalid_argument("SimConfig: integration_step must be positive");
}

std::size_t SimConfig::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

double mechanical_energy(const SimConfig& cfg, double q, double p) {
  return p * p / (2.0 * cfg.mass) + 0.5 * cfg.stiffness * q * q;
}

namespace {

SimResult observe(const SimConfig& cfg, std::vector<double> times, Eigen::MatrixXd trajectory,
                  Eigen::MatrixXd rates) {
  Eigen::MatrixXd states = trajectory;
  if (cfg.noise_std > 0.0) {
    Rng rng(cfg.seed);
    for (Eigen::Index j = 0; j < states.cols(); ++j) {
      for (Eigen::Index i = 0; i < 2; ++i) {
        states(i, j) += rng.normal(0.0, cfg.noise_std);
        rates(i, j) += rng.normal(0.0, cfg.noise_std);
      }
    }
  }
  SimResult out;
  out.times = std::move(times);
  out.trajectory = std::move(trajectory);
  out.pairs = TrainingPairs(std::move(states), std::move(rates));
  return out;
}

}  // namespace

SimResult simulate_mass_spring(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.sample_count();
  const double m = cfg.mass;
  const double k = cfg.stiffness;
  const double omega = std::sqrt(k / m);
  std::vector<double> times(n);
  Eigen::MatrixXd traj(2, static_cast<Eigen::Index>(n));
  Eigen::MatrixXd rates(2, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * cfg.dt;
    const double c = std::cos(omega * t);
    const double s = std::sin(omega * t);
    const double q = cfg.q0 * c + cfg.p0 / (m * omega) * s;
    const double p = -cfg.q0 * m * omega * s + cfg.p0 * c;
    const auto j = static_cast<Eigen::Index>(i);
    times[i] = t;
    traj(0, j) = q;
    traj(1, j) = p;
    rates(0, j) = p / m;
    rates(1, j) = -k * q;
  }
  return observe(cfg, std::move(times), std::move(traj), std::move(rates));
}

SimResult simulate_mass_spring_damper(const SimConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.sample_count();
  const double m = cfg.mass;
  const double k = cfg.stiffness;
  const double c = 2.0 * cfg.damping_ratio * std::sqrt(m * k);
  const auto rhs = [m, k, c](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd dx(2);
    dx(0) = x(1) / m;
    dx(1) = -k * x(0) - c * x(1) / m;
    return dx;
  };
  const auto substeps =
      static_cast<std::size_t>(std::max(1.0, std::ceil(cfg.dt / cfg.integration_step - 1e-9)));
  const double h = cfg.dt / static_cast<double>(substeps);

  std::vector<double> times(n);
  Eigen::MatrixXd traj(2, static_cast<Eigen::Index>(n));
  Eigen::MatrixXd rates(2, static_cast<Eigen::Index>(n));
  Eigen::VectorXd x(2);
  x << cfg.q0, cfg.p0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    if (i > 0) {
      for (std::size_t s = 0; s < substeps; ++s) x = rk4_step(rhs, x, h);
    }
    times[i] = static_cast<double>(i) * cfg.dt;
    traj.col(j) = x;
    rates.col(j) = rhs(x);
  }
  return observe(cfg, std::move(times), std::move(traj), std::move(rates));
}

}  // namespace hamfault
