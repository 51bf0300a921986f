#include "helpers.hpp"

#include "hamfault/features.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace hamfault;

namespace {

HnnRecord record(std::vector<std::size_t> sizes, std::uint64_t seed, const std::string& raw, const std::string& id) {
  HnnRecord r;
  r.model = HamiltonianModel(init_params(MlpSpec{std::move(sizes), Activation::Tanh, seed}));
  r.label = raw;
  r.sequence_id = id;
  return r;
}

oracle::Mat to_rows(const Eigen::MatrixXd& m) {
  oracle::Mat out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(testing::to_vec(m.row(i).transpose()));
  return out;
}

// Flip so the largest-magnitude entry is positive.
oracle::Vec canonical(oracle::Vec v) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  if (v[arg] < 0)
    for (double& x : v) x = -x;
  return v;
}

void check_against_jacobi(const Eigen::MatrixXd& data, std::size_t k) {
  const PcaModel pca = fit_pca(data, k);
  const auto [values, vectors] = oracle::jacobi_eigen(oracle::covariance(to_rows(data)));
  REQUIRE(pca.rank() == k);
  for (std::size_t r = 0; r < k; ++r) {
    CHECK(pca.explained_variance(static_cast<Eigen::Index>(r)) == doctest::Approx(values[r]).epsilon(1e-8));
    const oracle::Vec got = testing::to_vec(pca.components.row(static_cast<Eigen::Index>(r)).transpose());
    CHECK(oracle::rel_error(got, canonical(vectors[r])) < 1e-6);
  }
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("flattened weights follow the serialized order") {
  const HnnRecord r = record({2, 200, 200, 1}, 3, "normal", "n");
  const Eigen::VectorXd f = flatten_weights(r.model);
  CHECK(f.size() == 41001);
  const auto serialized = to_json(r.model.params());
  const MlpParams back = mlp_from_json(serialized);
  CHECK(testing::to_vec(f) == std::vector<double>(back.flat().begin(), back.flat().end()));
  // Perturbing one weight changes exactly one feature.
  HamiltonianModel m = r.model;
  m.params().weight(1)(3, 7) += 1.0;
  const Eigen::VectorXd g = flatten_weights(m);
  CHECK(((g - f).array() != 0.0).count() == 1);
  CHECK((g - f)(2 * 200 + 200 + 3 * 200 + 7) == doctest::Approx(1.0));
}

TEST_CASE("feature matrix construction") {
  const std::vector<HnnRecord> recs{record({2, 4, 1}, 1, "normal", "a"), record({2, 4, 1}, 2, "imbalance", "b"),
                                    record({2, 4, 1}, 3, "overhang/cage_fault", "c")};
  const FeatureMatrix fm = build_feature_matrix(recs);
  CHECK(fm.size() == 3);
  CHECK(fm.dim() == 17);
  CHECK(fm.class_indices() == std::vector<int>{0, 2, 3});
  CHECK(fm.labels[2].raw == "overhang/cage_fault");
  CHECK(fm.subset({2, 0}).sequence_ids == std::vector<std::string>{"c", "a"});
  std::vector<HnnRecord> mixed = recs;
  mixed.push_back(record({2, 5, 1}, 4, "normal", "d"));
  CHECK_THROWS(build_feature_matrix(mixed));
}

TEST_CASE("pca of collinear points") {
  Eigen::MatrixXd rows(4, 3);
  for (int i = 0; i < 4; ++i) rows.row(i) << i, 2.0 * i, -2.0 * i;
  const PcaModel pca = fit_pca(rows, 1);
  Eigen::RowVector3d dir(1.0, 2.0, -2.0);
  dir /= 3.0;
  // Largest-magnitude entries tie at 2/3; either sign convention keeps |dot| = 1.
  CHECK(std::abs(pca.components.row(0).dot(dir)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pca.explained_variance_ratio(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pca.mean(1) == doctest::Approx(3.0));
}

TEST_CASE("pca of two diagonal points") {
  Eigen::MatrixXd rows(2, 2);
  rows << -1, -1, 1, 1;
  const PcaModel pca = fit_pca(rows, 1);
  CHECK(pca.components(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(pca.components(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(pca.explained_variance_ratio(0) == doctest::Approx(1.0));
}

TEST_CASE("pca at the data rank reconstructs exactly") {
  // Rank-2 data in five dimensions.
  const Eigen::MatrixXd rows = testing::random_matrix(12, 2, 1) * testing::random_matrix(2, 5, 2);
  const PcaModel pca = fit_pca(rows, 2);
  const Eigen::MatrixXd recon = (pca_transform(pca, rows) * pca.components).rowwise() + pca.mean.transpose();
  CHECK((recon - rows).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("pca matches a Jacobi eigendecomposition") {
  SUBCASE("more rows than dimensions") { check_against_jacobi(testing::random_matrix(20, 8, 1), 5); }
  SUBCASE("fewer rows than dimensions") { check_against_jacobi(testing::random_matrix(6, 20, 2), 5); }
  SUBCASE("anisotropic data") {
    Eigen::MatrixXd d = testing::random_matrix(30, 6, 3);
    d.col(0) *= 10.0;
    d.col(3) *= 4.0;
    check_against_jacobi(d, 4);
  }
}

TEST_CASE("pca invariants") {
  const Eigen::MatrixXd rows = testing::random_matrix(12, 40, 5);
  const PcaModel pca = fit_pca(rows, 11);
  const Eigen::MatrixXd gram = pca.components * pca.components.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(11, 11)).cwiseAbs().maxCoeff() < 1e-8);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < 11; ++i) {
    if (i > 0) CHECK(pca.explained_variance(i) <= pca.explained_variance(i - 1));
    sum += pca.explained_variance_ratio(i);
    Eigen::Index arg;
    pca.components.row(i).cwiseAbs().maxCoeff(&arg);
    CHECK(pca.components(i, arg) > 0.0);
  }
  CHECK(sum <= 1.0 + 1e-12);
  // Full rank of centered 12 rows is 11, so the ratios account for all variance.
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
  // Projected coordinates are uncorrelated.
  const Eigen::MatrixXd z = pca_transform(pca, rows);
  const Eigen::MatrixXd cov = z.transpose() * z / 11.0;
  for (Eigen::Index i = 0; i < 11; ++i)
    for (Eigen::Index j = 0; j < 11; ++j)
      if (i != j) CHECK(std::abs(cov(i, j)) < 1e-8);
}

TEST_CASE("transform maps the mean to zero and is an isometry at full rank") {
  const Eigen::MatrixXd rows = testing::random_matrix(15, 4, 8);
  const PcaModel pca = fit_pca(rows, 4);
  CHECK(pca_transform(pca, pca.mean.transpose()).norm() < 1e-12);
  const Eigen::MatrixXd z = pca_transform(pca, rows);
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index j = 0; j < rows.rows(); ++j)
      CHECK(((z.row(i) - z.row(j)).norm()) == doctest::Approx((rows.row(i) - rows.row(j)).norm()).epsilon(1e-10));
  // Plain loops for (x - mean) . component.
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    for (Eigen::Index c = 0; c < 4; ++c) {
      double s = 0.0;
      for (Eigen::Index d = 0; d < 4; ++d) s += (rows(i, d) - pca.mean(d)) * pca.components(c, d);
      CHECK(z(i, c) == doctest::Approx(s).epsilon(1e-12));
    }
  // Reconstruction from all components is exact.
  const Eigen::MatrixXd recon = (z * pca.components).rowwise() + pca.mean.transpose();
  CHECK((recon - rows).norm() < 1e-10);
  CHECK_THROWS(pca_transform(pca, Eigen::MatrixXd::Zero(2, 5)));
}

TEST_CASE("pca input errors") {
  CHECK_THROWS(fit_pca(testing::random_matrix(5, 3, 1), 5));
  CHECK_THROWS(fit_pca(testing::random_matrix(5, 3, 1), 0));
  CHECK_THROWS(fit_pca(testing::random_matrix(1, 3, 1), 1));
  CHECK_THROWS(fit_pca(Eigen::MatrixXd::Ones(5, 3), 1));
  Eigen::MatrixXd bad = testing::random_matrix(5, 3, 1);
  bad(2, 2) = std::nan("");
  CHECK_THROWS(fit_pca(bad, 1));
  CHECK(default_pca_components(100, 41001) == 30);
  CHECK(default_pca_components(10, 41001) == 9);
  CHECK(default_pca_components(100, 4) == 4);
}

TEST_CASE("pca json round trip") {
  const PcaModel pca = fit_pca(testing::random_matrix(10, 6, 4), 3);
  const PcaModel back = pca_from_json(nlohmann::json::parse(to_json(pca).dump()));
  CHECK(back.mean == pca.mean);
  CHECK(back.components == pca.components);
  CHECK(back.explained_variance_ratio == pca.explained_variance_ratio);
}

TEST_CASE("feature csv round trip") {
  testing::TempDir dir("features");
  const std::vector<HnnRecord> recs{record({2, 3, 1}, 1, "normal", "normal/12.3"),
                                    record({2, 3, 1}, 2, "underhang/ball_fault", "underhang/ball_fault/0g/40.1")};
  const FeatureMatrix fm = build_feature_matrix(recs);
  write_feature_csv(dir / "f.csv", fm);
  const FeatureMatrix back = read_feature_csv(dir / "f.csv");
  CHECK(back.rows == fm.rows);
  CHECK(back.labels == fm.labels);
  CHECK(back.sequence_ids == fm.sequence_ids);
}

}
