#pragma once

#include <array>
#include <string>
#include <string_view>

namespace hamfault {

/// Aggregated operating regimes. Indices follow the pairwise-results table,
/// with Normal at 0.
enum class FaultClass : int {
  Normal = 0,
  HorizontalMisalignment = 1,
  Imbalance = 2,
  Overhang = 3,
  Underhang = 4,
  VerticalMisalignment = 5,
};

inline constexpr int kClassCount = 6;

inline constexpr std::array<FaultClass, kClassCount> kAllClasses = {
    FaultClass::Normal,   FaultClass::HorizontalMisalignment, FaultClass::Imbalance,
    FaultClass::Overhang, FaultClass::Underhang,              FaultClass::VerticalMisalignment,
};

/// The ten recorded operating states, as they appear in the dataset tree.
inline constexpr std::array<std::string_view, 10> kRawLabels = {
    "normal",
    "imbalance",
    "horizontal-misalignment",
    "vertical-misalignment",
    "underhang/outer_race",
    "underhang/ball_fault",
    "underhang/cage_fault",
    "overhang/outer_race",
    "overhang/ball_fault",
    "overhang/cage_fault",
};

struct ClassLabel {
  FaultClass cls = FaultClass::Normal;
  std::string raw;

  int index() const { return static_cast<int>(cls); }
  bool operator==(const ClassLabel&) const = default;
};

/// Fixed 10 -> 6 mapping; bearing sub-faults collapse into overhang/underhang.
/// Throws std::invalid_argument on anything outside kRawLabels.
ClassLabel aggregate_label(std::string_view raw);

std::string_view class_name(FaultClass cls);
FaultClass class_from_name(std::string_view name);
FaultClass class_from_index(int index);

}  // namespace hamfault
