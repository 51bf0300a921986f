#include "hamfault/labels.hpp"

#include <stdexcept>
#include <string>

namespace hamfault {

ClassLabel aggregate_label(std::string_view raw) {
  if (raw == "normal") return {FaultClass::Normal, std::string(raw)};
  if (raw == "imbalance") return {FaultClass::Imbalance, std::string(raw)};
  if (raw == "horizontal-misalignment") return {FaultClass::HorizontalMisalignment, std::string(raw)};
  if (raw == "vertical-misalignment") return {FaultClass::VerticalMisalignment, std::string(raw)};
  for (std::string_view bearing : {"underhang", "overhang"}) {
    for (std::string_view fault : {"outer_race", "ball_fault", "cage_fault"}) {
      if (raw.size() == bearing.size() + 1 + fault.size() && raw.starts_with(bearing) &&
          raw[bearing.size()] == '/' && raw.ends_with(fault)) {
        return {bearing == "underhang" ? FaultClass::Underhang : FaultClass::Overhang,
                std::string(raw)};
      }
    }
  }
  throw std::invalid_argument("unrecognized raw label '" + std::string(raw) + "'");
}

std::string_view class_name(FaultClass cls) {
  switch (cls) {
    case FaultClass::Normal: return "normal";
    case FaultClass::HorizontalMisalignment: return "horizontal-misalignment";
    case FaultClass::Imbalance: return "imbalance";
    case FaultClass::Overhang: return "overhang";
    case FaultClass::Underhang: return "underhang";
    case FaultClass::VerticalMisalignment: return "vertical-misalignment";
  }
  return "unknown";
}

FaultClass class_from_name(std::string_view name) {
  for (FaultClass c : kAllClasses) {
    if (class_name(c) == name) return c;
  }
  throw std::invalid_argument("unknown class name '" + std::string(name) + "'");
}

FaultClass class_from_index(int index) {
  if (index < 0 || index >= kClassCount) {
    throw std::invalid_argument("class index out of range: " + std::to_string(index));
  }
  return static_cast<FaultClass>(index);
}

}  // namespace hamfault
