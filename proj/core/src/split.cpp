#include "hamfault/split.hpp"

#include "hamfault/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace hamfault {

SplitIndices stratified_split(const std::vector<int>& labels, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split ratio must be in (0, 1)");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  SplitIndices split;
  split.seed = seed;
  split.ratio = ratio;
  for (auto& [label, rows] : by_class) {
    if (rows.size() < 2) {
      throw std::invalid_argument("class " + std::to_string(label) + " has " +
                                  std::to_string(rows.size()) + " sample(s); stratified split needs 2");
    }
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(label)));
    rng.shuffle(rows.begin(), rows.end());
    auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(rows.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, rows.size() - 1);
    split.train.insert(split.train.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.insert(split.test.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace hamfault
