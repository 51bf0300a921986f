#include "hamfault/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace hamfault {

RocCurve roc_auc(const std::vector<int>& y_true, const std::vector<double>& scores) {
  if (y_true.size() != scores.size()) throw std::invalid_argument("roc_auc: size mismatch");
  long long positives = 0;
  long long negatives = 0;
  for (int y : y_true) {
    if (y == 1) {
      ++positives;
    } else if (y == 0) {
      ++negatives;
    } else {
      throw std::invalid_argument("roc_auc: labels must be 0 or 1");
    }
  }
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument("roc_auc: both classes must be present");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  // Twice the number of correctly ordered (positive, negative) pairs, ties counting once.
  long long twice_correct = 0;
  long long tp = 0;
  long long fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    long long group_pos = 0;
    long long group_neg = 0;
    while (i < order.size() && scores[order[i]] == s) {
      (y_true[order[i]] == 1 ? group_pos : group_neg) += 1;
      ++i;
    }
    twice_correct += group_neg * (2 * tp + group_pos);
    tp += group_pos;
    fp += group_neg;
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives), s});
  }
  curve.auc = static_cast<double>(twice_correct) / (2.0 * static_cast<double>(positives) *
                                                    static_cast<double>(negatives));
  return curve;
}

namespace {

struct ClassF1 {
  double f1 = 0.0;
  bool undefined = false;
};

ClassF1 class_f1(const std::vector<int>& y_true, const std::vector<int>& y_pred, int label) {
  long long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] == label;
    const bool p = y_pred[i] == label;
    if (t && p) ++tp;
    if (!t && p) ++fp;
    if (t && !p) ++fn;
  }
  ClassF1 out;
  double precision = 0.0;
  double recall = 0.0;
  if (tp + fp == 0) {
    out.undefined = true;
  } else {
    precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn == 0) {
    out.undefined = true;
  } else {
    recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  out.f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  return out;
}

}  // namespace

F1Result f1_score(const std::vector<int>& y_true, const std::vector<int>& y_pred, Averaging averaging,
                  int positive_label) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("f1_score: size mismatch");
  if (y_true.empty()) throw std::invalid_argument("f1_score: empty input");
  F1Result result;
  if (averaging == Averaging::Binary) {
    const ClassF1 c = class_f1(y_true, y_pred, positive_label);
    result.value = c.f1;
    result.undefined = c.undefined;
    return result;
  }
  std::set<int> labels(y_true.begin(), y_true.end());
  labels.insert(y_pred.begin(), y_pred.end());
  double sum = 0.0;
  for (int label : labels) {
    const ClassF1 c = class_f1(y_true, y_pred, label);
    sum += c.f1;
    result.undefined = result.undefined || c.undefined;
  }
  result.value = sum / static_cast<double>(labels.size());
  return result;
}

Eigen::MatrixXi confusion_matrix(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                 const std::vector<int>& classes) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("confusion_matrix: size mismatch");
  const auto pos = [&](int label) -> Eigen::Index {
    const auto it = std::find(classes.begin(), classes.end(), label);
    if (it == classes.end()) throw std::invalid_argument("confusion_matrix: unknown label " + std::to_string(label));
    return it - classes.begin();
  };
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(classes.size()),
                                            static_cast<Eigen::Index>(classes.size()));
  for (std::size_t i = 0; i < y_true.size(); ++i) m(pos(y_true[i]), pos(y_pred[i])) += 1;
  return m;
}

}  // namespace hamfault
