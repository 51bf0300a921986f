#include "hamfault/forest.hpp"

#include "hamfault/parallel.hpp"
#include "hamfault/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace hamfault {

const std::vector<double>& DecisionTree::leaf(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const Node& n = nodes[static_cast<std::size_t>(i)];
    i = row(n.feature) <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].proba;
}

namespace {

struct TreeBuilder {
  const Eigen::MatrixXd& x;
  const std::vector<int>& y;  // class positions 0..n_classes-1
  std::size_t n_classes;
  const ForestConfig& config;
  std::size_t max_features;
  Rng rng;
  DecisionTree tree;

  std::vector<double> counts(const std::vector<std::size_t>& rows) const {
    std::vector<double> c(n_classes, 0.0);
    for (auto r : rows) c[static_cast<std::size_t>(y[r])] += 1.0;
    return c;
  }

  static double gini(const std::vector<double>& c, double total) {
    if (total <= 0.0) return 0.0;
    double s = 0.0;
    for (double v : c) s += (v / total) * (v / total);
    return 1.0 - s;
  }

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();  // weighted child impurity
  };

  Split best_split_on(std::size_t feature, const std::vector<std::size_t>& rows) const {
    std::vector<std::pair<double, int>> v;
    v.reserve(rows.size());
    for (auto r : rows) v.emplace_back(x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(feature)), y[r]);
    std::sort(v.begin(), v.end());
    Split best;
    if (v.front().first == v.back().first) return best;
    std::vector<double> left(n_classes, 0.0);
    std::vector<double> right(n_classes, 0.0);
    for (const auto& e : v) right[static_cast<std::size_t>(e.second)] += 1.0;
    const double total = static_cast<double>(v.size());
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      left[static_cast<std::size_t>(v[i].second)] += 1.0;
      right[static_cast<std::size_t>(v[i].second)] -= 1.0;
      if (v[i].first == v[i + 1].first) continue;
      const double nl = static_cast<double>(i + 1);
      const double nr = total - nl;
      const double score = nl * gini(left, nl) + nr * gini(right, nr);
      if (score < best.score) {
        best.feature = static_cast<int>(feature);
        best.threshold = 0.5 * (v[i].first + v[i + 1].first);
        if (!(best.threshold < v[i + 1].first)) best.threshold = v[i].first;
        best.score = score;
      }
    }
    return best;
  }

  int build(const std::vector<std::size_t>& rows, std::size_t depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::vector<double> c = counts(rows);
    const double total = static_cast<double>(rows.size());
    const bool pure = std::count_if(c.begin(), c.end(), [](double v) { return v > 0.0; }) <= 1;
    const bool depth_limited = config.max_depth > 0 && depth >= config.max_depth;
    if (pure || depth_limited || rows.size() < config.min_samples_split) {
      for (double& v : c) v /= total;
      tree.nodes[static_cast<std::size_t>(id)].proba = std::move(c);
      return id;
    }

    // Visit features in random order; examine at least max_features of them
    // and keep going past that only while no valid split has been found.
    std::vector<std::size_t> features(static_cast<std::size_t>(x.cols()));
    std::iota(features.begin(), features.end(), std::size_t{0});
    rng.shuffle(features.begin(), features.end());
    Split best;
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (i >= max_features && best.feature >= 0) break;
      const Split s = best_split_on(features[i], rows);
      if (s.feature >= 0 && s.score < best.score) best = s;
    }
    if (best.feature < 0) {
      for (double& v : c) v /= total;
      tree.nodes[static_cast<std::size_t>(id)].proba = std::move(c);
      return id;
    }

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (auto r : rows) {
      if (x(static_cast<Eigen::Index>(r), best.feature) <= best.threshold) {
        left_rows.push_back(r);
      } else {
        right_rows.push_back(r);
      }
    }
    const int left = build(left_rows, depth + 1);
    const int right = build(right_rows, depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left;
    node.right = right;
    return id;
  }
};

}  // namespace

ForestModel train_random_forest(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                const ForestConfig& config) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw std::invalid_argument("train_random_forest: row and label counts differ");
  }
  const std::set<int> distinct(y.begin(), y.end());
  if (distinct.size() < 2) throw std::invalid_argument("train_random_forest: need at least two classes");
  if (config.n_trees == 0) throw std::invalid_argument("train_random_forest: n_trees must be positive");

  ForestModel model;
  model.classes_.assign(distinct.begin(), distinct.end());
  model.dim_ = static_cast<std::size_t>(x.cols());
  std::vector<int> positions(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    positions[i] = static_cast<int>(std::lower_bound(model.classes_.begin(), model.classes_.end(), y[i]) -
                                    model.classes_.begin());
  }
  std::size_t max_features = config.max_features;
  if (max_features == 0) {
    max_features = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(x.cols()))));
  }
  max_features = std::clamp<std::size_t>(max_features, 1, static_cast<std::size_t>(x.cols()));

  model.trees_.resize(config.n_trees);
  parallel_for(config.n_trees, config.workers, [&](std::size_t t) {
    TreeBuilder builder{x, positions, model.classes_.size(), config, max_features,
                        Rng(mix_seed(config.seed, t)), {}};
    std::vector<std::size_t> rows(y.size());
    if (config.bootstrap) {
      for (auto& r : rows) r = builder.rng.index(y.size());
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    builder.build(rows, 0);
    model.trees_[t] = std::move(builder.tree);
  });
  return model;
}

Eigen::MatrixXd ForestModel::predict_proba(const Eigen::MatrixXd& x) const {
  if (static_cast<std::size_t>(x.cols()) != dim_) {
    throw std::invalid_argument("forest predict_proba: feature dimension mismatch");
  }
  Eigen::MatrixXd proba = Eigen::MatrixXd::Zero(x.rows(), static_cast<Eigen::Index>(classes_.size()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (const auto& tree : trees_) {
      const auto& p = tree.leaf(x.row(i));
      for (std::size_t c = 0; c < p.size(); ++c) proba(i, static_cast<Eigen::Index>(c)) += p[c];
    }
  }
  proba /= static_cast<double>(trees_.size());
  return proba;
}

std::vector<int> ForestModel::predict(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd proba = predict_proba(x);
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < proba.rows(); ++i) {
    Eigen::Index arg = 0;
    proba.row(i).maxCoeff(&arg);
    out[static_cast<std::size_t>(i)] = classes_[static_cast<std::size_t>(arg)];
  }
  return out;
}

nlohmann::json to_json(const ForestModel& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : model.trees_) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
      if (n.feature < 0) {
        nodes.push_back({{"proba", n.proba}});
      } else {
        nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  return {{"type", "random_forest"}, {"classes", model.classes_}, {"dim", model.dim_}, {"trees", trees}};
}

ForestModel forest_from_json(const nlohmann::json& doc) {
  ForestModel m;
  m.classes_ = doc.at("classes").get<std::vector<int>>();
  m.dim_ = doc.at("dim").get<std::size_t>();
  for (const auto& t : doc.at("trees")) {
    DecisionTree tree;
    for (const auto& j : t) {
      DecisionTree::Node n;
      if (j.contains("proba")) {
        n.proba = j.at("proba").get<std::vector<double>>();
      } else {
        n.feature = j.at("feature").get<int>();
        n.threshold = j.at("threshold").get<double>();
        n.left = j.at("left").get<int>();
        n.right = j.at("right").get<int>();
      }
      tree.nodes.push_back(std::move(n));
    }
    m.trees_.push_back(std::move(tree));
  }
  return m;
}

}  // namespace hamfault
