#pragma once

#include "hamfault/hnn.hpp"
#include "hamfault/labels.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace hamfault {

/// One flattened weight vector per sequence, row-aligned with labels and ids.
struct FeatureMatrix {
  Eigen::MatrixXd rows;
  std::vector<ClassLabel> labels;
  std::vector<std::string> sequence_ids;

  std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(rows.cols()); }
  std::vector<int> class_indices() const;
  /// Throws if shapes disagree or entries are non-finite.
  void validate() const;
  FeatureMatrix subset(const std::vector<std::size_t>& row_indices) const;
};

/// Same ordering as the serialized flat parameter array.
Eigen::VectorXd flatten_weights(const HamiltonianModel& model);

/// Stacks flattened weights of models with identical architecture.
FeatureMatrix build_feature_matrix(const std::vector<HnnRecord>& records);

struct PcaModel {
  Eigen::VectorXd mean;              // D
  Eigen::MatrixXd components;        // k x D, orthonormal rows
  Eigen::VectorXd explained_variance;        // eigenvalues of the sample covariance, descending
  Eigen::VectorXd explained_variance_ratio;  // k values in [0, 1]

  std::size_t rank() const { return static_cast<std::size_t>(components.rows()); }
};

/// Top-k principal axes of the mean-centered rows. Uses the n x n Gram matrix
/// when rows < dimension. Each component's largest-magnitude entry is positive.
PcaModel fit_pca(const Eigen::MatrixXd& rows, std::size_t k);

/// (x - mean) * components^T, row-wise.
Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& rows);

/// Default component count: min(30, rows - 1), further capped by the dimension.
std::size_t default_pca_components(std::size_t rows, std::size_t dim);

nlohmann::json to_json(const PcaModel& model);
PcaModel pca_from_json(const nlohmann::json& doc);

/// Header `sequence_id,label,f0,...,f{D-1}`; label is the aggregated class name
/// followed by the raw state after a colon when they differ.
void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& features);
FeatureMatrix read_feature_csv(const std::filesystem::path& path);

}  // namespace hamfault
