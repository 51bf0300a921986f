#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace hamfault {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = std::numeric_limits<double>::infinity();
};

struct RocCurve {
  double auc = 0.0;
  /// Starts at (0, 0) with an infinite threshold, then one point per distinct
  /// score in descending order; ends at (1, 1).
  std::vector<RocPoint> points;
};

/// AUC = P(score_pos > score_neg) + 0.5 * P(tie), computed from exact counts.
/// Labels are 0/1; throws when either class is absent.
RocCurve roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores);

enum class Averaging { Binary, Macro };

struct F1Result {
  double value = 0.0;
  /// Set when some precision or recall had a zero denominator (taken as 0).
  bool undefined = false;
};

/// Binary averaging scores `positive_label`; macro averages per-class F1 over
/// the union of labels seen in y_true and y_pred.
F1Result f1_score(const std::vector<int>& y_true, const std::vector<int>& y_pred, Averaging averaging,
                  int positive_label = 1);

/// counts(i, j): true class classes[i] predicted as classes[j].
Eigen::MatrixXi confusion_matrix(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                 const std::vector<int>& classes);

}  // namespace hamfault
