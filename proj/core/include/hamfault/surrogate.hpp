#pragma once

#include "hamfault/ingest.hpp"

#include <cstdint>
#include <string>

namespace hamfault {

inline constexpr double kMinRotationHz = 737.0 / 60.0;
inline constexpr double kMaxRotationHz = 3686.0 / 60.0;

/// Desk-scale stand-in for a recorded sequence. Every channel carries the
/// shared rotation fundamental; faults add class-specific spectral content:
///   imbalance        1x amplitude on radial/tangential channels, scaled by severity
///   horizontal mis.  boosted 2x harmonic on radial channels
///   vertical mis.    boosted 2x harmonic on axial channels (axial coupling)
///   underhang/overhang  amplitude-modulated high-frequency bursts on that
///                    bearing's accelerometers, repeating at a defect frequency
struct SurrogateConfig {
  std::string raw_label = "normal";
  double rotation_hz = 30.0;
  double severity = 1.0;
  double noise_std = 0.05;
  std::uint64_t seed = 0;
  double sample_rate = 5'000.0;
  double duration = 1.0;
  double min_rotation_hz = kMinRotationHz;
  double max_rotation_hz = kMaxRotationHz;

  void validate() const;
};

SequenceRecord generate_surrogate_sequence(const SurrogateConfig& cfg);

}  // namespace hamfault
