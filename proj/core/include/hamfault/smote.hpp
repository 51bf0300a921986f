#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace hamfault {

/// Rows of `x` are samples.
struct LabeledRows {
  Eigen::MatrixXd x;
  std::vector<int> y;
};

/// Synthetic minority over-sampling. Every class with fewer than
/// `target_count` rows is grown to exactly `target_count` by interpolating
/// x_i + u * (x_nn - x_i), u ~ U[0, 1], where x_nn is one of the k nearest
/// same-class neighbours of x_i. Original rows come first, unchanged.
/// Throws if an oversampled class has k_neighbors >= its size.
LabeledRows smote(const Eigen::MatrixXd& x, const std::vector<int>& y, std::size_t k_neighbors,
                  std::size_t target_count, std::uint64_t seed);

/// Oversamples every class up to the largest class count; k is clamped to
/// class size - 1 per class.
LabeledRows balance_classes(const Eigen::MatrixXd& x, const std::vector<int>& y,
                            std::size_t k_neighbors, std::uint64_t seed);

}  // namespace hamfault
