#include "helpers.hpp"

#include "hamfault/dynamics.hpp"
#include "hamfault/surrogate.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

using namespace hamfault;

namespace {

constexpr double kPi = std::numbers::pi;

// Underdamped closed form for p0 = 0.
std::pair<double, double> damped_closed_form(const SimConfig& c, double t) {
  const double w = std::sqrt(c.stiffness / c.mass);
  const double z = c.damping_ratio;
  const double wd = w * std::sqrt(1.0 - z * z);
  const double e = std::exp(-z * w * t);
  const double q = e * c.q0 * (std::cos(wd * t) + z * w / wd * std::sin(wd * t));
  const double v = -e * c.q0 * w * w / wd * std::sin(wd * t);
  return {q, c.mass * v};
}

// Single-bin DFT amplitude of one channel at frequency f.
double amplitude(const SequenceRecord& r, int channel, double f) {
  std::complex<double> acc = 0.0;
  const Eigen::Index n = r.channels.cols();
  for (Eigen::Index s = 0; s < n; ++s) {
    const double t = static_cast<double>(s) / r.sample_rate;
    acc += r.channels(channel, s) * std::polar(1.0, -2.0 * kPi * f * t);
  }
  return 2.0 * std::abs(acc) / static_cast<double>(n);
}

// Mean square of the band above a cutoff, via a first difference (high-pass).
double high_band_power(const SequenceRecord& r, int channel) {
  double s = 0.0;
  for (Eigen::Index i = 1; i < r.channels.cols(); ++i) {
    const double d = r.channels(channel, i) - r.channels(channel, i - 1);
    s += d * d;
  }
  return s / static_cast<double>(r.channels.cols() - 1);
}

SurrogateConfig surrogate(const std::string& raw) {
  SurrogateConfig c;
  c.raw_label = raw;
  c.rotation_hz = 30.0;
  c.noise_std = 0.0;
  c.seed = 4;
  return c;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("mass-spring quarter period") {
  SimConfig c;
  c.dt = kPi / 2.0 / 100.0;
  c.duration = kPi / 2.0 + c.dt;
  const SimResult r = simulate_mass_spring(c);
  REQUIRE(r.times.size() == 101);
  CHECK(r.times.back() == doctest::Approx(kPi / 2.0));
  CHECK(std::abs(r.trajectory(0, 100)) < 1e-12);
  CHECK(r.trajectory(1, 100) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("mass-spring conserves energy and reports exact rates") {
  SimConfig c;
  c.mass = 2.0;
  c.stiffness = 3.0;
  c.q0 = 0.5;
  c.p0 = -1.0;
  const SimResult r = simulate_mass_spring(c);
  const double e0 = mechanical_energy(c, c.q0, c.p0);
  CHECK(e0 == doctest::Approx(0.25 + 0.375));
  for (Eigen::Index j = 0; j < r.trajectory.cols(); ++j) {
    CHECK(std::abs(mechanical_energy(c, r.trajectory(0, j), r.trajectory(1, j)) - e0) < 1e-12);
    CHECK(r.pairs.rates()(0, j) == doctest::Approx(r.trajectory(1, j) / 2.0));
    CHECK(r.pairs.rates()(1, j) == doctest::Approx(-3.0 * r.trajectory(0, j)));
  }
}

TEST_CASE("observation noise is seeded and leaves the clean trajectory alone") {
  SimConfig c;
  c.noise_std = 0.1;
  c.seed = 5;
  const SimResult a = simulate_mass_spring(c);
  const SimResult b = simulate_mass_spring(c);
  CHECK(a.pairs.states() == b.pairs.states());
  CHECK(a.pairs.rates() == b.pairs.rates());
  c.noise_std = 0.0;
  const SimResult clean = simulate_mass_spring(c);
  CHECK(clean.trajectory == a.trajectory);
  const double rms = (a.pairs.states() - clean.pairs.states()).norm() / std::sqrt(2.0 * a.pairs.size());
  CHECK(rms == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("undamped damper matches the closed form") {
  SimConfig c;
  c.damping_ratio = 0.0;
  const SimResult num = simulate_mass_spring_damper(c);
  const SimResult ref = simulate_mass_spring(c);
  CHECK((num.trajectory - ref.trajectory).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("underdamped damper matches the closed form") {
  for (double zeta : {0.1, 0.5}) {
    SimConfig c;
    c.damping_ratio = zeta;
    c.mass = 1.5;
    c.stiffness = 4.0;
    const SimResult r = simulate_mass_spring_damper(c);
    for (std::size_t i = 0; i < r.times.size(); i += 37) {
      const auto [q, p] = damped_closed_form(c, r.times[i]);
      const auto j = static_cast<Eigen::Index>(i);
      CHECK(std::abs(r.trajectory(0, j) - q) < 1e-8);
      CHECK(std::abs(r.trajectory(1, j) - p) < 1e-8);
    }
  }
}

TEST_CASE("damped energy never increases") {
  for (double zeta : {0.1, 0.3, 1.0}) {
    SimConfig c;
    c.damping_ratio = zeta;
    const SimResult r = simulate_mass_spring_damper(c);
    double prev = mechanical_energy(c, c.q0, c.p0);
    for (Eigen::Index j = 1; j < r.trajectory.cols(); ++j) {
      const double e = mechanical_energy(c, r.trajectory(0, j), r.trajectory(1, j));
      CHECK(e <= prev + 1e-9);
      prev = e;
    }
    CHECK(prev < 0.5 * mechanical_energy(c, c.q0, c.p0));
  }
}

TEST_CASE("critical damping never crosses zero") {
  SimConfig c;
  c.damping_ratio = 1.0;
  const SimResult r = simulate_mass_spring_damper(c);
  CHECK(r.trajectory.row(0).minCoeff() > 0.0);
}

TEST_CASE("damper rates follow the equations of motion") {
  SimConfig c;
  c.damping_ratio = 0.3;
  c.mass = 2.0;
  c.stiffness = 5.0;
  const SimResult r = simulate_mass_spring_damper(c);
  const double damping = 2.0 * 0.3 * std::sqrt(10.0);
  for (Eigen::Index j = 0; j < r.trajectory.cols(); j += 100) {
    const double q = r.trajectory(0, j), p = r.trajectory(1, j);
    CHECK(r.pairs.rates()(0, j) == doctest::Approx(p / 2.0));
    CHECK(r.pairs.rates()(1, j) == doctest::Approx(-5.0 * q - damping * p / 2.0));
  }
}

TEST_CASE("simulation config validation") {
  for (auto mutate : std::vector<void (*)(SimConfig&)>{
           [](SimConfig& c) { c.mass = 0.0; }, [](SimConfig& c) { c.stiffness = -1.0; },
           [](SimConfig& c) { c.dt = 0.0; }, [](SimConfig& c) { c.damping_ratio = -0.1; },
           [](SimConfig& c) { c.duration = 0.0; }}) {
    SimConfig c;
    mutate(c);
    CHECK_THROWS_AS(simulate_mass_spring_damper(c), std::invalid_argument);
  }
}

TEST_CASE("surrogate shape and determinism") {
  SurrogateConfig c = surrogate("imbalance");
  c.noise_std = 0.05;
  const SequenceRecord a = generate_surrogate_sequence(c);
  CHECK(a.channels.rows() == 8);
  CHECK(a.channels.cols() == 5000);
  CHECK(a.label.cls == FaultClass::Imbalance);
  CHECK(a.rotation_hz.value() == 30.0);
  CHECK(generate_surrogate_sequence(c).channels == a.channels);
  c.seed = 5;
  CHECK_FALSE(generate_surrogate_sequence(c).channels == a.channels);
}

TEST_CASE("surrogate validation") {
  SurrogateConfig c = surrogate("mystery_fault");
  CHECK_THROWS(generate_surrogate_sequence(c));
  c = surrogate("normal");
  c.rotation_hz = 5.0;
  CHECK_THROWS(generate_surrogate_sequence(c));
  c.rotation_hz = 70.0;
  CHECK_THROWS(generate_surrogate_sequence(c));
}

TEST_CASE("surrogate fault signatures") {
  const SequenceRecord normal = generate_surrogate_sequence(surrogate("normal"));
  const double f = 30.0;
  SUBCASE("imbalance raises the fundamental on radial channels") {
    const SequenceRecord r = generate_surrogate_sequence(surrogate("imbalance"));
    CHECK(amplitude(r, 2, f) > 2.0 * amplitude(normal, 2, f));
    CHECK(amplitude(r, 1, f) == doctest::Approx(amplitude(normal, 1, f)).epsilon(1e-9));
  }
  SUBCASE("horizontal misalignment raises the second harmonic radially") {
    const SequenceRecord r = generate_surrogate_sequence(surrogate("horizontal-misalignment"));
    CHECK(amplitude(r, 5, 2 * f) > 3.0 * amplitude(normal, 5, 2 * f));
    CHECK(amplitude(r, 4, 2 * f) == doctest::Approx(amplitude(normal, 4, 2 * f)).epsilon(1e-9));
  }
  SUBCASE("vertical misalignment raises the second harmonic axially") {
    const SequenceRecord r = generate_surrogate_sequence(surrogate("vertical-misalignment"));
    CHECK(amplitude(r, 1, 2 * f) > 3.0 * amplitude(normal, 1, 2 * f));
    CHECK(amplitude(r, 2, 2 * f) == doctest::Approx(amplitude(normal, 2, 2 * f)).epsilon(1e-9));
  }
  SUBCASE("bearing faults add high-frequency energy on their own bearing") {
    const SequenceRecord under = generate_surrogate_sequence(surrogate("underhang/outer_race"));
    const SequenceRecord over = generate_surrogate_sequence(surrogate("overhang/cage_fault"));
    CHECK(high_band_power(under, 2) > 5.0 * high_band_power(normal, 2));
    CHECK(high_band_power(under, 5) == doctest::Approx(high_band_power(normal, 5)).epsilon(1e-9));
    CHECK(high_band_power(over, 5) > 5.0 * high_band_power(normal, 5));
    CHECK(high_band_power(over, 2) == doctest::Approx(high_band_power(normal, 2)).epsilon(1e-9));
  }
}

}
