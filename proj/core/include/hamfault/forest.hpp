#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <vector>

namespace hamfault {

struct ForestConfig {
  std::size_t n_trees = 100;
  std::size_t max_depth = 0;          // 0: unlimited
  std::size_t min_samples_split = 2;
  std::size_t max_features = 0;       // 0: floor(sqrt(D)), at least 1
  bool bootstrap = true;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// CART classification tree with Gini impurity. Leaves store class
/// frequencies over the forest's class list.
struct DecisionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> proba;
  };
  std::vector<Node> nodes;

  const std::vector<double>& leaf(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
};

/// Bagged CART trees, sqrt(D) candidate features per split, probability voting.
class ForestModel {
 public:
  const std::vector<int>& classes() const { return classes_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& x) const;
  std::vector<int> predict(const Eigen::MatrixXd& x) const;

  friend ForestModel train_random_forest(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                         const ForestConfig& config);
  friend nlohmann::json to_json(const ForestModel& model);
  friend ForestModel forest_from_json(const nlohmann::json& doc);

 private:
  std::vector<int> classes_;
  std::size_t dim_ = 0;
  std::vector<DecisionTree> trees_;
};

/// Throws if fewer than two classes are present. Seed-deterministic regardless
/// of the worker count.
ForestModel train_random_forest(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                const ForestConfig& config);

nlohmann::json to_json(const ForestModel& model);
ForestModel forest_from_json(const nlohmann::json& doc);

}  // namespace hamfault
