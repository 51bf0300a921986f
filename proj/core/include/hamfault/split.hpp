#pragma once

#include <cstdint>
#include <vector>

namespace hamfault {

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
  std::uint64_t seed = 0;
  double ratio = 0.7;
};

/// Per-class shuffled split; each class contributes round(ratio * n_c) rows to
/// train, clamped so that both partitions receive at least one row.
/// Throws if any class has fewer than 2 samples.
SplitIndices stratified_split(const std::vector<int>& labels, double ratio, std::uint64_t seed);

}  // namespace hamfault
