#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <vector>

namespace hamfault {

struct LogisticConfig {
  double l2 = 1e-3;
  std::size_t iterations = 500;
  double learning_rate = 0.5;
};

/// L2-regularized logistic regression on internally standardized features.
/// Two classes use a single sigmoid; more use one-vs-rest with the per-class
/// sigmoids renormalized to sum to one.
class LogisticModel {
 public:
  const std::vector<int>& classes() const { return classes_; }
  /// rows x classes().size()
  Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& x) const;
  std::vector<int> predict(const Eigen::MatrixXd& x) const;

  friend LogisticModel train_logistic(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                      const LogisticConfig& config);
  friend nlohmann::json to_json(const LogisticModel& model);
  friend LogisticModel logistic_from_json(const nlohmann::json& doc);

 private:
  std::vector<int> classes_;
  Eigen::RowVectorXd mean_;
  Eigen::RowVectorXd scale_;
  Eigen::MatrixXd weights_;  // one row per sigmoid
  Eigen::VectorXd bias_;
};

/// Full-batch gradient descent on mean log-loss + l2/2 * ||w||^2.
/// Throws if fewer than two classes are present.
LogisticModel train_logistic(const Eigen::MatrixXd& x, const std::vector<int>& y,
                             const LogisticConfig& config);

nlohmann::json to_json(const LogisticModel& model);
LogisticModel logistic_from_json(const nlohmann::json& doc);

}  // namespace hamfault
