#include "hamfault/logistic.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace hamfault {

namespace {

Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& z) { return 1.0 / (1.0 + (-z).exp()); }

std::vector<double> to_vec(const Eigen::MatrixXd& m) {
  std::vector<double> v(static_cast<std::size_t>(m.size()));
  Eigen::Map<Eigen::MatrixXd>(v.data(), m.rows(), m.cols()) = m;
  return v;
}

}  // namespace

LogisticModel train_logistic(const Eigen::MatrixXd& x, const std::vector<int>& y,
                             const LogisticConfig& config) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw std::invalid_argument("train_logistic: row and label counts differ");
  }
  const std::set<int> distinct(y.begin(), y.end());
  if (distinct.size() < 2) throw std::invalid_argument("train_logistic: need at least two classes");

  LogisticModel model;
  model.classes_.assign(distinct.begin(), distinct.end());
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  model.mean_ = x.colwise().mean();
  model.scale_ = ((x.rowwise() - model.mean_).colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt();
  for (Eigen::Index c = 0; c < d; ++c) {
    if (!(model.scale_(c) > 1e-12)) model.scale_(c) = 1.0;
  }
  const Eigen::MatrixXd xs =
      ((x.rowwise() - model.mean_).array().rowwise() / model.scale_.array()).matrix();

  const std::size_t k = model.classes_.size() == 2 ? 1 : model.classes_.size();
  model.weights_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), d);
  model.bias_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));

  // Targets: column j is the indicator of the positive class of sigmoid j.
  Eigen::MatrixXd targets(n, static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const int positive = k == 1 ? model.classes_[1] : model.classes_[j];
      targets(i, static_cast<Eigen::Index>(j)) = y[static_cast<std::size_t>(i)] == positive ? 1.0 : 0.0;
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t it = 0; it < config.iterations; ++it) {
    Eigen::MatrixXd z = xs * model.weights_.transpose();
    z.rowwise() += model.bias_.transpose();
    const Eigen::MatrixXd residual = sigmoid(z.array()).matrix() - targets;
    const Eigen::MatrixXd grad_w = inv_n * residual.transpose() * xs + config.l2 * model.weights_;
    const Eigen::VectorXd grad_b = inv_n * residual.colwise().sum().transpose();
    model.weights_ -= config.learning_rate * grad_w;
    model.bias_ -= config.learning_rate * grad_b;
  }
  return model;
}

Eigen::MatrixXd LogisticModel::predict_proba(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean_.size()) throw std::invalid_argument("predict_proba: feature dimension mismatch");
  const Eigen::MatrixXd xs = ((x.rowwise() - mean_).array().rowwise() / scale_.array()).matrix();
  Eigen::MatrixXd z = xs * weights_.transpose();
  z.rowwise() += bias_.transpose();
  const Eigen::MatrixXd s = sigmoid(z.array()).matrix();
  Eigen::MatrixXd proba(x.rows(), static_cast<Eigen::Index>(classes_.size()));
  if (classes_.size() == 2) {
    proba.col(0) = (1.0 - s.col(0).array()).matrix();
    proba.col(1) = s.col(0);
  } else {
    proba = s.array().colwise() / s.rowwise().sum().array();
  }
  return proba;
}

std::vector<int> LogisticModel::predict(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd proba = predict_proba(x);
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < proba.rows(); ++i) {
    Eigen::Index arg = 0;
    proba.row(i).maxCoeff(&arg);
    out[static_cast<std::size_t>(i)] = classes_[static_cast<std::size_t>(arg)];
  }
  return out;
}

nlohmann::json to_json(const LogisticModel& model) {
  return {{"type", "logistic_regression"},
          {"classes", model.classes_},
          {"mean", to_vec(model.mean_)},
          {"scale", to_vec(model.scale_)},
          {"weights_rows", model.weights_.rows()},
          {"weights", to_vec(model.weights_)},
          {"bias", to_vec(model.bias_)}};
}

LogisticModel logistic_from_json(const nlohmann::json& doc) {
  LogisticModel m;
  m.classes_ = doc.at("classes").get<std::vector<int>>();
  const auto mean = doc.at("mean").get<std::vector<double>>();
  const auto scale = doc.at("scale").get<std::vector<double>>();
  const auto w = doc.at("weights").get<std::vector<double>>();
  const auto b = doc.at("bias").get<std::vector<double>>();
  const auto rows = doc.at("weights_rows").get<Eigen::Index>();
  const auto d = static_cast<Eigen::Index>(mean.size());
  if (scale.size() != mean.size() || static_cast<Eigen::Index>(w.size()) != rows * d ||
      static_cast<Eigen::Index>(b.size()) != rows) {
    throw std::invalid_argument("logistic model JSON has inconsistent shapes");
  }
  m.mean_ = Eigen::Map<const Eigen::RowVectorXd>(mean.data(), d);
  m.scale_ = Eigen::Map<const Eigen::RowVectorXd>(scale.data(), d);
  m.weights_ = Eigen::Map<const Eigen::MatrixXd>(w.data(), rows, d);
  m.bias_ = Eigen::Map<const Eigen::VectorXd>(b.data(), rows);
  return m;
}

}  // namespace hamfault
