#include "hamfault/smote.hpp"

#include "hamfault/random.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hamfault {

namespace {

// Indices (into `members`) of the k nearest neighbours of members[i], excluding itself.
std::vector<std::size_t> nearest(const Eigen::MatrixXd& x, const std::vector<std::size_t>& members,
                                 std::size_t i, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(members.size() - 1);
  const auto row_i = x.row(static_cast<Eigen::Index>(members[i]));
  for (std::size_t j = 0; j < members.size(); ++j) {
    if (j == i) continue;
    dist.emplace_back((x.row(static_cast<Eigen::Index>(members[j])) - row_i).squaredNorm(), j);
  }
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<std::size_t> out(k);
  for (std::size_t n = 0; n < k; ++n) out[n] = dist[n].second;
  return out;
}

LabeledRows oversample(const Eigen::MatrixXd& x, const std::vector<int>& y,
                       const std::map<int, std::size_t>& k_per_class, std::size_t target_count,
                       std::uint64_t seed) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw std::invalid_argument("smote: row and label counts differ");
  }
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(i);

  std::size_t extra = 0;
  for (const auto& [label, rows] : members) {
    if (rows.size() >= target_count) continue;
    const std::size_t k = k_per_class.at(label);
    if (k == 0 || k >= rows.size()) {
      throw std::invalid_argument("smote: class " + std::to_string(label) + " has " +
                                  std::to_string(rows.size()) + " samples, too few for k=" +
                                  std::to_string(k));
    }
    extra += target_count - rows.size();
  }

  LabeledRows out;
  out.x.resize(x.rows() + static_cast<Eigen::Index>(extra), x.cols());
  out.x.topRows(x.rows()) = x;
  out.y = y;
  Eigen::Index next = x.rows();
  for (const auto& [label, rows] : members) {
    if (rows.size() >= target_count) continue;
    const std::size_t k = k_per_class.at(label);
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(label)));
    std::vector<std::vector<std::size_t>> neighbours(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) neighbours[i] = nearest(x, rows, i, k);
    // Base points cycle through a shuffled order so every member seeds
    // roughly the same number of synthetic rows.
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order.begin(), order.end());
    const std::size_t needed = target_count - rows.size();
    for (std::size_t s = 0; s < needed; ++s) {
      const std::size_t i = order[s % order.size()];
      const std::size_t nn = neighbours[i][rng.index(k)];
      const double u = rng.uniform();
      const auto base = x.row(static_cast<Eigen::Index>(rows[i]));
      const auto other = x.row(static_cast<Eigen::Index>(rows[nn]));
      out.x.row(next++) = base + u * (other - base);
      out.y.push_back(label);
    }
  }
  return out;
}

}  // namespace

LabeledRows smote(const Eigen::MatrixXd& x, const std::vector<int>& y, std::size_t k_neighbors,
                  std::size_t target_count, std::uint64_t seed) {
  std::map<int, std::size_t> k_per_class;
  for (int label : y) k_per_class[label] = k_neighbors;
  return oversample(x, y, k_per_class, target_count, seed);
}

LabeledRows balance_classes(const Eigen::MatrixXd& x, const std::vector<int>& y,
                            std::size_t k_neighbors, std::uint64_t seed) {
  std::map<int, std::size_t> counts;
  for (int label : y) counts[label] += 1;
  std::size_t target = 0;
  for (const auto& [label, n] : counts) target = std::max(target, n);
  std::map<int, std::size_t> k_per_class;
  for (const auto& [label, n] : counts) k_per_class[label] = std::min(k_neighbors, n - 1);
  return oversample(x, y, k_per_class, target, seed);
}

}  // namespace hamfault
