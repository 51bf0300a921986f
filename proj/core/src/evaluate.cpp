#include "hamfault/evaluate.hpp"

#include "hamfault/random.hpp"
#include "hamfault/smote.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace hamfault {

std::string TaskSpec::id() const {
  switch (kind) {
    case TaskKind::Binary: return "binary";
    case TaskKind::Multiclass: return "multiclass";
    case TaskKind::Pairwise: return "pairwise-" + std::to_string(static_cast<int>(fault));
  }
  return "unknown";
}

bool TaskSpec::includes(int class_index) const {
  if (kind != TaskKind::Pairwise) return true;
  return class_index == 0 || class_index == static_cast<int>(fault);
}

int TaskSpec::target(int class_index) const {
  switch (kind) {
    case TaskKind::Binary: return class_index == 0 ? 0 : 1;
    case TaskKind::Multiclass: return class_index;
    case TaskKind::Pairwise: return class_index == static_cast<int>(fault) ? 1 : 0;
  }
  return class_index;
}

std::vector<TaskSpec> standard_tasks() {
  std::vector<TaskSpec> tasks = {{TaskKind::Binary, FaultClass::Normal},
                                 {TaskKind::Multiclass, FaultClass::Normal}};
  for (int k = 1; k < kClassCount; ++k) tasks.push_back({TaskKind::Pairwise, class_from_index(k)});
  return tasks;
}

ReducedFeatures reduce_features(const FeatureMatrix& features, const SplitIndices& split,
                                std::size_t components, bool standardize) {
  features.validate();
  Eigen::MatrixXd train(static_cast<Eigen::Index>(split.train.size()), features.rows.cols());
  for (std::size_t i = 0; i < split.train.size(); ++i) {
    train.row(static_cast<Eigen::Index>(i)) = features.rows.row(static_cast<Eigen::Index>(split.train[i]));
  }
  const std::size_t k =
      components > 0 ? components : default_pca_components(split.train.size(), features.dim());
  ReducedFeatures out;
  Eigen::MatrixXd all = features.rows;
  if (standardize) {
    const Eigen::RowVectorXd mean = train.colwise().mean();
    const double denom = std::max<double>(1.0, static_cast<double>(train.rows() - 1));
    out.column_scale = ((train.rowwise() - mean).colwise().squaredNorm() / denom).cwiseSqrt().transpose();
    for (Eigen::Index j = 0; j < out.column_scale.size(); ++j) {
      if (!(out.column_scale(j) > 1e-12)) out.column_scale(j) = 1.0;
    }
    const Eigen::RowVectorXd inv = out.column_scale.cwiseInverse().transpose();
    train = train.array().rowwise() * inv.array();
    all = all.array().rowwise() * inv.array();
  }
  out.pca = fit_pca(train, k);
  out.rows = pca_transform(out.pca, all);
  return out;
}

namespace {

struct TaskRows {
  Eigen::MatrixXd x;
  std::vector<int> y;
};

TaskRows select_rows(const TaskSpec& task, const Eigen::MatrixXd& reduced, const std::vector<int>& labels,
                     const std::vector<std::size_t>& rows) {
  std::vector<std::size_t> kept;
  for (auto r : rows) {
    if (task.includes(labels.at(r))) kept.push_back(r);
  }
  TaskRows out;
  out.x.resize(static_cast<Eigen::Index>(kept.size()), reduced.cols());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = reduced.row(static_cast<Eigen::Index>(kept[i]));
    out.y.push_back(task.target(labels[kept[i]]));
  }
  return out;
}

Eigen::MatrixXd predict_proba(const ClassifierModel& model, const Eigen::MatrixXd& x) {
  return std::visit([&](const auto& m) { return m.predict_proba(x); }, model);
}

const std::vector<int>& model_classes(const ClassifierModel& model) {
  return std::visit([](const auto& m) -> const std::vector<int>& { return m.classes(); }, model);
}

std::string model_type(const ClassifierModel& model) {
  return std::holds_alternative<LogisticModel>(model) ? "logistic_regression" : "random_forest";
}

}  // namespace

TaskTraining train_task(const TaskSpec& task, const Eigen::MatrixXd& reduced, const std::vector<int>& labels,
                        const SplitIndices& split, const EvaluationConfig& config) {
  TaskTraining out;
  const TaskRows train = select_rows(task, reduced, labels, split.train);
  std::map<int, std::size_t> counts;
  for (int y : train.y) counts[y] += 1;
  const std::size_t expected = task.kind == TaskKind::Multiclass ? static_cast<std::size_t>(kClassCount) : 2;
  if (counts.size() < 2) {
    out.skip_reason = "training partition holds fewer than two classes";
    return out;
  }
  if (counts.size() < expected) {
    out.skip_reason = "training partition is missing " + std::to_string(expected - counts.size()) + " class(es)";
    return out;
  }
  for (const auto& [cls, n] : counts) {
    if (n < 2) {
      out.skip_reason = "class " + std::to_string(cls) + " has a single training row; SMOTE needs two";
      return out;
    }
  }
  const std::uint64_t stream = static_cast<std::uint64_t>(task.kind) * 16 + static_cast<std::uint64_t>(task.fault);
  const LabeledRows balanced = balance_classes(train.x, train.y, config.smote_k, mix_seed(config.seed, stream));

  TrainedTask trained{task, LogisticModel{}, train.y.size(), balanced.y.size()};
  if (task.kind == TaskKind::Multiclass) {
    trained.model = train_logistic(balanced.x, balanced.y, config.logistic);
  } else {
    ForestConfig fc = config.forest;
    fc.seed = mix_seed(config.forest.seed, stream);
    trained.model = train_random_forest(balanced.x, balanced.y, fc);
  }
  out.trained = std::move(trained);
  return out;
}

EvalReport skipped_report(const TaskSpec& task, const std::string& reason) {
  EvalReport r;
  r.task_id = task.id();
  r.kind = task.kind;
  r.model_type = task.kind == TaskKind::Multiclass ? "logistic_regression" : "random_forest";
  r.skipped = true;
  r.skip_reason = reason;
  return r;
}

EvalReport evaluate_task(const TrainedTask& trained, const Eigen::MatrixXd& reduced,
                         const std::vector<int>& labels, const SplitIndices& split) {
  const TaskSpec& task = trained.task;
  const TaskRows test = select_rows(task, reduced, labels, split.test);
  const std::vector<int>& classes = model_classes(trained.model);
  const std::set<int> present(test.y.begin(), test.y.end());
  for (int c : classes) {
    if (!present.contains(c)) {
      return skipped_report(task, "class " + std::to_string(c) + " is missing from the test partition");
    }
  }

  EvalReport report;
  report.task_id = task.id();
  report.kind = task.kind;
  report.model_type = model_type(trained.model);
  report.classes = classes;
  report.test_size = test.y.size();

  const Eigen::MatrixXd proba = predict_proba(trained.model, test.x);
  std::vector<int> predicted(test.y.size());
  for (Eigen::Index i = 0; i < proba.rows(); ++i) {
    Eigen::Index arg = 0;
    proba.row(i).maxCoeff(&arg);
    predicted[static_cast<std::size_t>(i)] = classes[static_cast<std::size_t>(arg)];
  }
  report.confusion = confusion_matrix(test.y, predicted, classes);

  if (task.kind == TaskKind::Multiclass) {
    double sum = 0.0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      std::vector<int> y_bin(test.y.size());
      std::vector<double> scores(test.y.size());
      for (std::size_t i = 0; i < test.y.size(); ++i) {
        y_bin[i] = test.y[i] == classes[c] ? 1 : 0;
        scores[i] = proba(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
      }
      report.roc.push_back(roc_auc(y_bin, scores));
      report.per_class_auc.push_back(report.roc.back().auc);
      sum += report.roc.back().auc;
    }
    report.auc = sum / static_cast<double>(classes.size());
    const F1Result f1 = f1_score(test.y, predicted, Averaging::Macro);
    report.f1 = f1.value;
    report.f1_undefined = f1.undefined;
  } else {
    std::vector<double> scores(test.y.size());
    for (std::size_t i = 0; i < test.y.size(); ++i) scores[i] = proba(static_cast<Eigen::Index>(i), 1);
    report.roc.push_back(roc_auc(test.y, scores));
    report.auc = report.roc.back().auc;
    const F1Result f1 = f1_score(test.y, predicted, Averaging::Binary, 1);
    report.f1 = f1.value;
    report.f1_undefined = f1.undefined;
  }
  return report;
}

std::vector<EvalReport> evaluate_tasks(const FeatureMatrix& features, const SplitIndices& split,
                                       const EvaluationConfig& config) {
  const ReducedFeatures reduced = reduce_features(features, split, config.pca_components, config.standardize);
  const std::vector<int> labels = features.class_indices();
  std::vector<EvalReport> reports;
  for (const TaskSpec& task : standard_tasks()) {
    const TaskTraining training = train_task(task, reduced.rows, labels, split, config);
    if (!training.trained) {
      reports.push_back(skipped_report(task, training.skip_reason));
      continue;
    }
    reports.push_back(evaluate_task(*training.trained, reduced.rows, labels, split));
  }
  return reports;
}

namespace {

std::string kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::Binary: return "binary";
    case TaskKind::Multiclass: return "multiclass";
    case TaskKind::Pairwise: return "pairwise";
  }
  return "unknown";
}

TaskKind kind_from_name(const std::string& name) {
  if (name == "binary") return TaskKind::Binary;
  if (name == "multiclass") return TaskKind::Multiclass;
  if (name == "pairwise") return TaskKind::Pairwise;
  throw std::invalid_argument("unknown task kind '" + name + "'");
}

nlohmann::json threshold_json(double t) { return std::isfinite(t) ? nlohmann::json(t) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json doc = {{"task", r.task_id}, {"kind", kind_name(r.kind)}, {"model", r.model_type},
                        {"skipped", r.skipped}};
  if (r.skipped) {
    doc["skip_reason"] = r.skip_reason;
    return doc;
  }
  doc["classes"] = r.classes;
  doc["auc"] = r.auc;
  doc["f1"] = r.f1;
  doc["f1_undefined"] = r.f1_undefined;
  doc["test_size"] = r.test_size;
  if (!r.per_class_auc.empty()) doc["per_class_auc"] = r.per_class_auc;
  nlohmann::json confusion = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.confusion.rows(); ++i) {
    std::vector<int> row(static_cast<std::size_t>(r.confusion.cols()));
    for (Eigen::Index j = 0; j < r.confusion.cols(); ++j) row[static_cast<std::size_t>(j)] = r.confusion(i, j);
    confusion.push_back(row);
  }
  doc["confusion"] = confusion;
  nlohmann::json curves = nlohmann::json::array();
  for (const auto& c : r.roc) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : c.points) pts.push_back({p.fpr, p.tpr, threshold_json(p.threshold)});
    curves.push_back({{"auc", c.auc}, {"points", pts}});
  }
  doc["roc"] = curves;
  return doc;
}

EvalReport eval_report_from_json(const nlohmann::json& doc) {
  EvalReport r;
  r.task_id = doc.at("task").get<std::string>();
  r.kind = kind_from_name(doc.at("kind").get<std::string>());
  r.model_type = doc.value("model", std::string());
  r.skipped = doc.value("skipped", false);
  if (r.skipped) {
    r.skip_reason = doc.value("skip_reason", std::string());
    return r;
  }
  r.classes = doc.at("classes").get<std::vector<int>>();
  r.auc = doc.at("auc").get<double>();
  r.f1 = doc.at("f1").get<double>();
  r.f1_undefined = doc.value("f1_undefined", false);
  r.test_size = doc.at("test_size").get<std::size_t>();
  r.per_class_auc = doc.value("per_class_auc", std::vector<double>{});
  const auto& confusion = doc.at("confusion");
  r.confusion.resize(static_cast<Eigen::Index>(confusion.size()), static_cast<Eigen::Index>(confusion.size()));
  for (std::size_t i = 0; i < confusion.size(); ++i) {
    for (std::size_t j = 0; j < confusion[i].size(); ++j) {
      r.confusion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = confusion[i][j].get<int>();
    }
  }
  for (const auto& c : doc.at("roc")) {
    RocCurve curve;
    curve.auc = c.at("auc").get<double>();
    for (const auto& p : c.at("points")) {
      RocPoint pt;
      pt.fpr = p[0].get<double>();
      pt.tpr = p[1].get<double>();
      pt.threshold = p[2].is_null() ? std::numeric_limits<double>::infinity() : p[2].get<double>();
      curve.points.push_back(pt);
    }
    r.roc.push_back(std::move(curve));
  }
  return r;
}

nlohmann::json to_json(const ClassifierModel& model) {
  return std::visit([](const auto& m) { return to_json(m); }, model);
}

ClassifierModel classifier_from_json(const nlohmann::json& doc) {
  const std::string type = doc.at("type").get<std::string>();
  if (type == "logistic_regression") return logistic_from_json(doc);
  if (type == "random_forest") return forest_from_json(doc);
  throw std::invalid_argument("unknown classifier type '" + type + "'");
}

nlohmann::json to_json(const SplitIndices& split) {
  return {{"train", split.train}, {"test", split.test}, {"seed", split.seed}, {"ratio", split.ratio}};
}

SplitIndices split_from_json(const nlohmann::json& doc) {
  SplitIndices s;
  s.train = doc.at("train").get<std::vector<std::size_t>>();
  s.test = doc.at("test").get<std::vector<std::size_t>>();
  s.seed = doc.at("seed").get<std::uint64_t>();
  s.ratio = doc.at("ratio").get<double>();
  return s;
}

nlohmann::json to_json(const EvaluationConfig& c) {
  return {{"logistic", {{"l2", c.logistic.l2}, {"iterations", c.logistic.iterations},
                        {"learning_rate", c.logistic.learning_rate}}},
          {"forest", {{"n_trees", c.forest.n_trees}, {"max_depth", c.forest.max_depth},
                      {"min_samples_split", c.forest.min_samples_split},
                      {"max_features", c.forest.max_features}, {"bootstrap", c.forest.bootstrap},
                      {"seed", c.forest.seed}}},
          {"smote_k", c.smote_k},
          {"pca_components", c.pca_components},
          {"standardize", c.standardize},
          {"seed", c.seed}};
}

EvaluationConfig evaluation_config_from_json(const nlohmann::json& doc) {
  EvaluationConfig c;
  if (doc.contains("logistic")) {
    const auto& l = doc.at("logistic");
    c.logistic.l2 = l.value("l2", c.logistic.l2);
    c.logistic.iterations = l.value("iterations", c.logistic.iterations);
    c.logistic.learning_rate = l.value("learning_rate", c.logistic.learning_rate);
  }
  if (doc.contains("forest")) {
    const auto& f = doc.at("forest");
    c.forest.n_trees = f.value("n_trees", c.forest.n_trees);
    c.forest.max_depth = f.value("max_depth", c.forest.max_depth);
    c.forest.min_samples_split = f.value("min_samples_split", c.forest.min_samples_split);
    c.forest.max_features = f.value("max_features", c.forest.max_features);
    c.forest.bootstrap = f.value("bootstrap", c.forest.bootstrap);
    c.forest.seed = f.value("seed", c.forest.seed);
  }
  c.smote_k = doc.value("smote_k", c.smote_k);
  c.pca_components = doc.value("pca_components", c.pca_components);
  c.standardize = doc.value("standardize", c.standardize);
  c.seed = doc.value("seed", c.seed);
  return c;
}

}  // namespace hamfault
