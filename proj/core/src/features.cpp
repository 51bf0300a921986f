#include "hamfault/features.hpp"

#include "hamfault/csv.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hamfault {

std::vector<int> FeatureMatrix::class_indices() const {
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(l.index());
  return out;
}

void FeatureMatrix::validate() const {
  if (labels.size() != size() || sequence_ids.size() != size()) {
    throw std::invalid_argument("feature matrix: row, label and id counts differ");
  }
  if (!rows.allFinite()) throw std::invalid_argument("feature matrix contains non-finite entries");
}

FeatureMatrix FeatureMatrix::subset(const std::vector<std::size_t>& row_indices) const {
  FeatureMatrix out;
  out.rows.resize(static_cast<Eigen::Index>(row_indices.size()), rows.cols());
  for (std::size_t i = 0; i < row_indices.size(); ++i) {
    out.rows.row(static_cast<Eigen::Index>(i)) = rows.row(static_cast<Eigen::Index>(row_indices[i]));
    out.labels.push_back(labels.at(row_indices[i]));
    out.sequence_ids.push_back(sequence_ids.at(row_indices[i]));
  }
  return out;
}

Eigen::VectorXd flatten_weights(const HamiltonianModel& model) {
  const auto flat = model.params().flat();
  return Eigen::Map<const Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
}

FeatureMatrix build_feature_matrix(const std::vector<HnnRecord>& records) {
  FeatureMatrix out;
  if (records.empty()) return out;
  const MlpSpec& spec = records.front().model.params().spec();
  out.rows.resize(static_cast<Eigen::Index>(records.size()),
                  static_cast<Eigen::Index>(spec.parameter_count()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].model.params().spec().layer_sizes != spec.layer_sizes) {
      throw std::invalid_argument("model '" + records[i].sequence_id +
                                  "' has a different architecture; weight features are not comparable");
    }
    out.rows.row(static_cast<Eigen::Index>(i)) = flatten_weights(records[i].model).transpose();
    out.labels.push_back(aggregate_label(records[i].label));
    out.sequence_ids.push_back(records[i].sequence_id);
  }
  return out;
}

std::size_t default_pca_components(std::size_t rows, std::size_t dim) {
  if (rows < 2) return 0;
  return std::min<std::size_t>({30, rows - 1, dim});
}

namespace {

void fix_sign(Eigen::MatrixXd& m, Eigen::Index row) {
  Eigen::Index arg = 0;
  m.row(row).cwiseAbs().maxCoeff(&arg);
  if (m(row, arg) < 0.0) m.row(row) *= -1.0;
}

// Extends `basis` (rows) with unit vectors orthogonalized against it until it
// has `k` rows. Only needed when k exceeds the rank of the centered data.
void complete_basis(Eigen::MatrixXd& basis, Eigen::Index filled, Eigen::Index k) {
  const Eigen::Index dim = basis.cols();
  for (Eigen::Index e = 0; e < dim && filled < k; ++e) {
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Unit(dim, e);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index r = 0; r < filled; ++r) v -= v.dot(basis.row(r)) * basis.row(r);
    }
    const double n = v.norm();
    if (n > 1e-6) basis.row(filled++) = v / n;
  }
}

}  // namespace

PcaModel fit_pca(const Eigen::MatrixXd& rows, std::size_t k) {
  const Eigen::Index n = rows.rows();
  const Eigen::Index dim = rows.cols();
  if (n < 2) throw std::invalid_argument("fit_pca: need at least 2 rows");
  if (k == 0 || k > static_cast<std::size_t>(std::min(n - 1, dim))) {
    throw std::invalid_argument("fit_pca: k=" + std::to_string(k) + " must be in [1, min(rows-1, dim)=" +
                                std::to_string(std::min(n - 1, dim)) + "]");
  }
  if (!rows.allFinite()) throw std::invalid_argument("fit_pca: non-finite input");

  PcaModel model;
  model.mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - model.mean.transpose();
  const double denom = static_cast<double>(n - 1);
  const double total_variance = centered.squaredNorm() / denom;
  if (!(total_variance > 0.0)) throw std::invalid_argument("fit_pca: all rows are identical");

  const auto kk = static_cast<Eigen::Index>(k);
  model.components.resize(kk, dim);
  model.explained_variance.resize(kk);
  // Eigenvalues below this are numerically zero; their axes are arbitrary.
  const double floor = total_variance * 1e-12;
  Eigen::Index filled = 0;

  if (n - 1 < dim) {
    const Eigen::MatrixXd gram = centered * centered.transpose() / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) throw std::runtime_error("fit_pca: eigensolver failed");
    for (Eigen::Index i = 0; i < kk; ++i) {
      const Eigen::Index src = n - 1 - i;
      const double lambda = std::max(0.0, eig.eigenvalues()(src));
      model.explained_variance(i) = lambda;
      if (lambda > floor) {
        Eigen::RowVectorXd v = (centered.transpose() * eig.eigenvectors().col(src)).transpose();
        model.components.row(i) = v / v.norm();
        ++filled;
      }
    }
  } else {
    const Eigen::MatrixXd cov = centered.transpose() * centered / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw std::runtime_error("fit_pca: eigensolver failed");
    for (Eigen::Index i = 0; i < kk; ++i) {
      const Eigen::Index src = dim - 1 - i;
      const double lambda = std::max(0.0, eig.eigenvalues()(src));
      model.explained_variance(i) = lambda;
      model.components.row(i) = eig.eigenvectors().col(src).transpose();
    }
    filled = kk;
  }
  if (filled < kk) complete_basis(model.components, filled, kk);
  for (Eigen::Index i = 0; i < kk; ++i) fix_sign(model.components, i);
  model.explained_variance_ratio = model.explained_variance / total_variance;
  return model;
}

Eigen::MatrixXd pca_transform(const PcaModel& model, const Eigen::MatrixXd& rows) {
  if (rows.cols() != model.mean.size()) {
    throw std::invalid_argument("pca_transform: input has " + std::to_string(rows.cols()) +
                                " columns, model expects " + std::to_string(model.mean.size()));
  }
  return (rows.rowwise() - model.mean.transpose()) * model.components.transpose();
}

nlohmann::json to_json(const PcaModel& model) {
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json comps = nlohmann::json::array();
  for (Eigen::Index r = 0; r < model.components.rows(); ++r) {
    comps.push_back(vec(model.components.row(r).transpose()));
  }
  return {{"mean", vec(model.mean)},
          {"components", comps},
          {"explained_variance", vec(model.explained_variance)},
          {"explained_variance_ratio", vec(model.explained_variance_ratio)}};
}

PcaModel pca_from_json(const nlohmann::json& doc) {
  auto vec = [](const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  PcaModel m;
  m.mean = vec(doc.at("mean"));
  const auto& comps = doc.at("components");
  m.components.resize(static_cast<Eigen::Index>(comps.size()), m.mean.size());
  for (std::size_t r = 0; r < comps.size(); ++r) {
    const Eigen::VectorXd row = vec(comps[r]);
    if (row.size() != m.mean.size()) throw std::invalid_argument("PCA component length mismatch");
    m.components.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  m.explained_variance = vec(doc.at("explained_variance"));
  m.explained_variance_ratio = vec(doc.at("explained_variance_ratio"));
  return m;
}

namespace {

std::string label_cell(const ClassLabel& label) {
  const std::string name(class_name(label.cls));
  if (label.raw.empty() || label.raw == name) return name;
  return name + ":" + label.raw;
}

ClassLabel parse_label_cell(const std::string& cell) {
  const auto colon = cell.find(':');
  if (colon == std::string::npos) {
    const FaultClass cls = class_from_name(cell);
    return {cls, std::string(class_name(cls))};
  }
  ClassLabel label = aggregate_label(cell.substr(colon + 1));
  if (label.cls != class_from_name(cell.substr(0, colon))) {
    throw std::invalid_argument("label cell '" + cell + "' is inconsistent");
  }
  return label;
}

}  // namespace

void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& features) {
  features.validate();
  std::string out = "sequence_id,label";
  for (std::size_t c = 0; c < features.dim(); ++c) out += ",f" + std::to_string(c);
  out += '\n';
  for (std::size_t r = 0; r < features.size(); ++r) {
    out += features.sequence_ids[r];
    out += ',';
    out += label_cell(features.labels[r]);
    for (Eigen::Index c = 0; c < features.rows.cols(); ++c) {
      out += ',';
      out += csv::format(features.rows(static_cast<Eigen::Index>(r), c));
    }
    out += '\n';
  }
  csv::write_file(path, out);
}

FeatureMatrix read_feature_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::read_table(path);
  if (table.header.size() < 2 || table.header[0] != "sequence_id" || table.header[1] != "label") {
    throw std::runtime_error(path.string() + ": expected header sequence_id,label,f0,...");
  }
  const std::size_t dim = table.header.size() - 2;
  FeatureMatrix out;
  out.rows.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != dim + 2) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(r + 2) + " has " +
                               std::to_string(row.size()) + " cells, expected " + std::to_string(dim + 2));
    }
    out.sequence_ids.push_back(row[0]);
    out.labels.push_back(parse_label_cell(row[1]));
    for (std::size_t c = 0; c < dim; ++c) {
      out.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          csv::parse_cell(row[c + 2], r + 2, c + 3);
    }
  }
  return out;
}

}  // namespace hamfault
