#pragma once

#include "hamfault/features.hpp"
#include "hamfault/forest.hpp"
#include "hamfault/logistic.hpp"
#include "hamfault/metrics.hpp"
#include "hamfault/split.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hamfault {

enum class TaskKind { Binary, Multiclass, Pairwise };

/// binary: normal vs abnormal (random forest); multiclass: six aggregated
/// classes (one-vs-rest logistic regression); pairwise-k: normal vs class k
/// (random forest).
struct TaskSpec {
  TaskKind kind = TaskKind::Binary;
  FaultClass fault = FaultClass::Normal;  // pairwise only

  std::string id() const;
  /// Rows of the full label set that take part in this task.
  bool includes(int class_index) const;
  /// Task-level target for an aggregated class index.
  int target(int class_index) const;
};

/// binary, multiclass, pairwise-1 .. pairwise-5
std::vector<TaskSpec> standard_tasks();

struct EvaluationConfig {
  LogisticConfig logistic;
  ForestConfig forest;
  std::size_t smote_k = 5;
  std::size_t pca_components = 0;  // 0: default_pca_components
  /// Scale feature columns to unit variance (training rows) before PCA.
  bool standardize = false;
  std::uint64_t seed = 0;
};

using ClassifierModel = std::variant<LogisticModel, ForestModel>;

struct TrainedTask {
  TaskSpec task;
  ClassifierModel model;
  std::size_t train_rows = 0;      // before oversampling
  std::size_t augmented_rows = 0;  // after oversampling
};

struct EvalReport {
  std::string task_id;
  TaskKind kind = TaskKind::Binary;
  std::string model_type;
  std::vector<int> classes;            // task-level class values
  std::vector<RocCurve> roc;           // one curve (binary/pairwise) or one per class
  std::vector<double> per_class_auc;   // multiclass only
  double auc = 0.0;                    // macro for multiclass
  double f1 = 0.0;                     // binary F1 of the positive class, macro for multiclass
  bool f1_undefined = false;
  Eigen::MatrixXi confusion;
  std::size_t test_size = 0;
  bool skipped = false;
  std::string skip_reason;
};

/// Reduced features: PCA fitted on the training rows only, applied to all rows.
struct ReducedFeatures {
  PcaModel pca;
  Eigen::MatrixXd rows;
  Eigen::VectorXd column_scale;  // empty unless standardized; columns are divided by it before PCA
};

ReducedFeatures reduce_features(const FeatureMatrix& features, const SplitIndices& split,
                                std::size_t components, bool standardize = false);

struct TaskTraining {
  std::optional<TrainedTask> trained;
  std::string skip_reason;
};

/// Selects the task's training rows, balances them with SMOTE and fits the
/// task's classifier. `trained` is empty and `skip_reason` set when a class
/// is missing or too small in the training partition.
TaskTraining train_task(const TaskSpec& task, const Eigen::MatrixXd& reduced,
                        const std::vector<int>& labels, const SplitIndices& split,
                        const EvaluationConfig& config);

EvalReport evaluate_task(const TrainedTask& trained, const Eigen::MatrixXd& reduced,
                         const std::vector<int>& labels, const SplitIndices& split);

EvalReport skipped_report(const TaskSpec& task, const std::string& reason);

/// PCA (train rows) -> per task: SMOTE (train rows) -> classifier -> test metrics.
std::vector<EvalReport> evaluate_tasks(const FeatureMatrix& features, const SplitIndices& split,
                                       const EvaluationConfig& config);

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ClassifierModel& model);
ClassifierModel classifier_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SplitIndices& split);
SplitIndices split_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const EvaluationConfig& config);
EvaluationConfig evaluation_config_from_json(const nlohmann::json& doc);

}  // namespace hamfault
