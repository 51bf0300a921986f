#include "hamfault/surrogate.hpp"

#include "hamfault/random.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hamfault {

void SurrogateConfig::validate() const {
  (void)aggregate_label(raw_label);
  if (!(rotation_hz >= min_rotation_hz && rotation_hz <= max_rotation_hz)) {
    throw std::invalid_argument("surrogate rotation frequency " + std::to_string(rotation_hz) +
                                " Hz outside [" + std::to_string(min_rotation_hz) + ", " +
                                std::to_string(max_rotation_hz) + "]");
  }
  if (!(severity >= 0.0)) throw std::invalid_argument("surrogate severity must be >= 0");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("surrogate noise_std must be >= 0");
  if (!(sample_rate > 0.0) || !(duration > 0.0)) {
    throw std::invalid_argument("surrogate sample_rate and duration must be positive");
  }
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Channel layout: 0 tachometer, 1-3 underhang (axial, radial, tangential),
// 4-6 overhang (axial, radial, tangential), 7 microphone.
constexpr std::array<double, kChannelCount> kFundamentalGain = {1.0, 0.6, 1.0, 0.9, 0.5, 0.8, 0.7, 0.4};
constexpr std::array<double, kChannelCount> kFundamentalPhase = {0.0, 0.4, 1.1, 2.6, 0.9, 1.9, 3.4, 5.0};
constexpr std::array<double, kChannelCount> kSecondPhase = {0.0, 1.3, 0.2, 2.2, 2.9, 0.7, 1.6, 4.1};
constexpr double kNormalSecond = 0.12;
constexpr double kNormalThird = 0.04;

bool is_radial(std::size_t c) { return c == 2 || c == 5; }
bool is_axial(std::size_t c) { return c == 1 || c == 4; }
bool is_tangential(std::size_t c) { return c == 3 || c == 6; }

}  // namespace

SequenceRecord generate_surrogate_sequence(const SurrogateConfig& cfg) {
  cfg.validate();
  const ClassLabel label = aggregate_label(cfg.raw_label);
  const auto samples = static_cast<Eigen::Index>(std::llround(cfg.sample_rate * cfg.duration));
  Rng rng(cfg.seed);
  const double shaft_phase = rng.uniform(0.0, kTwoPi);

  std::array<double, kChannelCount> first{};
  std::array<double, kChannelCount> second{};
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    first[c] = kFundamentalGain[c];
    second[c] = c == 0 ? 0.0 : kNormalSecond * kFundamentalGain[c];
  }
  std::array<double, kChannelCount> burst{};
  double defect_order = 0.0;
  double carrier_fraction = 0.0;

  switch (label.cls) {
    case FaultClass::Normal: break;
    case FaultClass::Imbalance:
      for (std::size_t c = 1; c < 7; ++c) {
        if (is_radial(c) || is_tangential(c)) first[c] *= 1.0 + 1.5 * cfg.severity;
      }
      break;
    case FaultClass::HorizontalMisalignment:
      for (std::size_t c = 1; c < 7; ++c) {
        if (is_radial(c)) second[c] = (0.3 + 0.9 * cfg.severity) * kFundamentalGain[c];
      }
      break;
    case FaultClass::VerticalMisalignment:
      for (std::size_t c = 1; c < 7; ++c) {
        if (is_axial(c)) {
          second[c] = (0.3 + 0.9 * cfg.severity) * kFundamentalGain[c];
          first[c] *= 1.0 + 0.5 * cfg.severity;
        }
      }
      break;
    case FaultClass::Underhang:
      for (std::size_t c = 1; c <= 3; ++c) burst[c] = 0.9 * cfg.severity;
      defect_order = 3.58;
      carrier_fraction = 0.31;
      break;
    case FaultClass::Overhang:
      for (std::size_t c = 4; c <= 6; ++c) burst[c] = 0.9 * cfg.severity;
      defect_order = 5.42;
      carrier_fraction = 0.19;
      break;
  }

  SequenceRecord record;
  record.sample_rate = cfg.sample_rate;
  record.label = label;
  record.rotation_hz = cfg.rotation_hz;
  record.channels.resize(static_cast<Eigen::Index>(kChannelCount), samples);
  const double omega = kTwoPi * cfg.rotation_hz;
  const double carrier = kTwoPi * carrier_fraction * cfg.sample_rate;
  const double defect = kTwoPi * defect_order * cfg.rotation_hz;
  for (Eigen::Index s = 0; s < samples; ++s) {
    const double t = static_cast<double>(s) / cfg.sample_rate;
    const double shaft = omega * t + shaft_phase;
    const double envelope = std::pow(0.5 * (1.0 + std::cos(defect * t)), 4.0);
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      double v = first[c] * std::sin(shaft + kFundamentalPhase[c]);
      if (c > 0) {
        v += second[c] * std::sin(2.0 * shaft + kSecondPhase[c]);
        v += kNormalThird * kFundamentalGain[c] * std::sin(3.0 * shaft + kSecondPhase[c] + 0.5);
      }
      if (burst[c] > 0.0) v += burst[c] * envelope * std::sin(carrier * t + kFundamentalPhase[c]);
      v += rng.normal(0.0, cfg.noise_std);
      record.channels(static_cast<Eigen::Index>(c), s) = v;
    }
  }
  return record;
}

}  // namespace hamfault
