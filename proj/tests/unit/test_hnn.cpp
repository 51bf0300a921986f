#include "helpers.hpp"

#include "hamfault/hnn.hpp"
#include "hamfault/ode.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

using namespace hamfault;

namespace {

// H(q, p) = a q + b p + c, exactly representable with a single affine layer.
HamiltonianModel linear_model(double a, double b, double c = 0.0) {
  const MlpSpec spec{{2, 1}, Activation::Identity, 0};
  return HamiltonianModel(unflatten(spec, std::vector<double>{a, b, c}));
}

HamiltonianModel random_model(std::uint64_t seed) {
  MlpParams params = init_params(MlpSpec{{2, 10, 10, 1}, Activation::Tanh, seed});
  Rng rng(seed);
  for (double& v : params.flat()) v += rng.uniform(-0.1, 0.1);
  return HamiltonianModel(params);
}

PhasePoint point(double q, double p) {
  PhasePoint x;
  x.q = Eigen::VectorXd::Constant(1, q);
  x.p = Eigen::VectorXd::Constant(1, p);
  return x;
}

TrainingPairs pairs_from(const std::vector<std::array<double, 4>>& rows) {
  Eigen::MatrixXd states(2, rows.size()), rates(2, rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    states.col(i) << rows[i][0], rows[i][1];
    rates.col(i) << rows[i][2], rows[i][3];
  }
  return TrainingPairs(states, rates);
}

}  // namespace

TEST_SUITE("hnn") {

TEST_CASE("symplectic map of a known gradient") {
  // dH/dq = 2, dH/dp = 5  ->  (dq/dt, dp/dt) = (5, -2)
  const HamiltonianModel model = linear_model(2.0, 5.0, 1.0);
  const auto [dq, dp] = symplectic_field(model, point(0.3, -0.7));
  CHECK(dq(0) == doctest::Approx(5.0));
  CHECK(dp(0) == doctest::Approx(-2.0));
  CHECK(hamiltonian(model, point(1.0, 1.0)) == doctest::Approx(8.0));
}

TEST_CASE("constant Hamiltonian has a zero field") {
  const HamiltonianModel model = linear_model(0.0, 0.0, 4.2);
  const auto [dq, dp] = symplectic_field(model, point(1.5, -2.0));
  CHECK(dq(0) == 0.0);
  CHECK(dp(0) == 0.0);
  CHECK(hamiltonian(model, point(-3.0, 9.0)) == doctest::Approx(4.2));
}

TEST_CASE("Hamiltonian value matches the loop oracle") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const HamiltonianModel model = random_model(seed);
    const PhasePoint x = point(0.2 * static_cast<double>(seed), -0.4);
    const double h = hamiltonian(model, x);
    CHECK(h == doctest::Approx(oracle::forward(testing::to_net(model.params()), {x.q(0), x.p(0)})[0]).epsilon(1e-12));
    CHECK(hamiltonian(model, x) == h);
  }
}

TEST_CASE("field of a random network matches the rotated finite-difference gradient") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const HamiltonianModel model = random_model(seed);
    const oracle::Net net = testing::to_net(model.params());
    const oracle::Vec x{0.4 * static_cast<double>(seed) - 1.0, 0.3};
    const oracle::Vec g =
        oracle::fd_gradient([&](const oracle::Vec& v) { return oracle::forward(net, v)[0]; }, x);
    const auto [dq, dp] = symplectic_field(model, point(x[0], x[1]));
    CHECK(oracle::rel_error({dq(0), dp(0)}, {g[1], -g[0]}) < 1e-6);
  }
}

TEST_CASE("batched field equals pointwise field") {
  const HamiltonianModel model = random_model(9);
  const Eigen::MatrixXd xs = testing::random_matrix(2, 7, 10);
  const Eigen::MatrixXd f = symplectic_field_batch(model, xs);
  for (Eigen::Index j = 0; j < xs.cols(); ++j) {
    const auto [dq, dp] = symplectic_field(model, point(xs(0, j), xs(1, j)));
    CHECK(f(0, j) == doctest::Approx(dq(0)).epsilon(1e-12));
    CHECK(f(1, j) == doctest::Approx(dp(0)).epsilon(1e-12));
  }
}

TEST_CASE("loss arithmetic") {
  const HamiltonianModel zero = linear_model(0.0, 0.0);
  // Zero field against rates (1, 2): 1^2 + 2^2.
  CHECK(hnn_loss(zero, pairs_from({{0, 0, 1, 2}})) == doctest::Approx(5.0));
  // Per-pair losses 5 and 1 average to 3.
  CHECK(hnn_loss(zero, pairs_from({{0, 0, 1, 2}, {3, 4, 1, 0}})) == doctest::Approx(3.0));
  // A field that reproduces the rates has zero loss.
  const HamiltonianModel exact = linear_model(-2.0, 1.0);
  CHECK(hnn_loss(exact, pairs_from({{0.1, 0.2, 1, 2}, {5, -1, 1, 2}})) == doctest::Approx(0.0));
  CHECK_THROWS(hnn_loss(zero, TrainingPairs()));
}

TEST_CASE("loss gradient matches finite differences of the oracle loss") {
  const HamiltonianModel model = random_model(3);
  const oracle::Net net = testing::to_net(model.params());
  const Eigen::MatrixXd s = testing::random_matrix(2, 6, 4);
  const Eigen::MatrixXd r = testing::random_matrix(2, 6, 5);
  oracle::Mat states, rates;
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    states.push_back(testing::to_vec(s.col(j)));
    rates.push_back(testing::to_vec(r.col(j)));
  }
  const ParamGradient pg = hnn_loss_gradient(model, TrainingPairs(s, r));
  const auto loss = [&](const oracle::Vec& flat) {
    oracle::Net n = net;
    n.flat = flat;
    return oracle::hnn_loss(n, states, rates);
  };
  CHECK(pg.loss == doctest::Approx(loss(net.flat)).epsilon(1e-12));
  CHECK(oracle::rel_error(pg.grad, oracle::fd_gradient(loss, net.flat)) < 1e-6);
}

TEST_CASE("training pairs validation") {
  CHECK_THROWS(TrainingPairs(Eigen::MatrixXd::Zero(3, 4), Eigen::MatrixXd::Zero(3, 4)));
  CHECK_THROWS(TrainingPairs(Eigen::MatrixXd::Zero(2, 4), Eigen::MatrixXd::Zero(2, 3)));
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(1, 1) = std::nan("");
  CHECK_THROWS(TrainingPairs(bad, Eigen::MatrixXd::Zero(2, 2)));
  TrainingPairs pairs = pairs_from({{1, 2, 3, 4}});
  pairs.push_back(pairs.at(0));
  CHECK(pairs.size() == 2);
  CHECK(pairs.select({1}).states()(1, 0) == 2.0);
}

TEST_CASE("model shape checks") {
  CHECK_THROWS(HamiltonianModel(init_params(MlpSpec{{2, 4, 2}, Activation::Tanh, 0})));
  CHECK_THROWS(HamiltonianModel(init_params(MlpSpec{{3, 4, 1}, Activation::Tanh, 0})));
  CHECK(hnn_spec(1, HnnTrainConfig{}).layer_sizes == std::vector<std::size_t>{2, 200, 200, 1});
}

TEST_CASE("training fits constant rates") {
  // dq/dt = 0.5, dp/dt = 0 is the flow of H = 0.5 p.
  const Eigen::MatrixXd states = testing::random_matrix(2, 256, 17);
  Eigen::MatrixXd rates(2, 256);
  rates.row(0).setConstant(0.5);
  rates.row(1).setZero();
  HnnTrainConfig cfg;
  cfg.hidden = {16};
  cfg.epochs = 400;
  cfg.batch_size = 32;
  cfg.learning_rate = 1e-2;
  cfg.seed = 3;
  const HnnTrainResult r = train_hnn(TrainingPairs(states, rates), cfg);
  CHECK(r.final_loss < 1e-4);
  CHECK(r.epochs_run <= cfg.epochs);
  CHECK(r.loss_history.size() == r.epochs_run);
}

TEST_CASE("training is deterministic for a fixed seed") {
  const Eigen::MatrixXd states = testing::random_matrix(2, 64, 1);
  const Eigen::MatrixXd rates = testing::random_matrix(2, 64, 2);
  HnnTrainConfig cfg;
  cfg.hidden = {8, 8};
  cfg.epochs = 5;
  cfg.batch_size = 16;
  cfg.seed = 11;
  const TrainingPairs pairs(states, rates);
  const HnnTrainResult a = train_hnn(pairs, cfg);
  const HnnTrainResult b = train_hnn(pairs, cfg);
  CHECK(a.model == b.model);
  CHECK(a.loss_history == b.loss_history);
  cfg.seed = 12;
  CHECK_FALSE(train_hnn(pairs, cfg).model == a.model);
}

TEST_CASE("training input errors") {
  HnnTrainConfig cfg;
  cfg.hidden = {4};
  cfg.batch_size = 8;
  CHECK_THROWS_AS(train_hnn(TrainingPairs(), cfg), std::invalid_argument);
  CHECK_THROWS_AS(train_hnn(TrainingPairs(Eigen::MatrixXd::Zero(2, 15), Eigen::MatrixXd::Zero(2, 15)), cfg),
                  std::invalid_argument);
  cfg.learning_rate = 0.0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("integration of a zero field stays put") {
  const auto path = integrate(linear_model(0.0, 0.0, 1.0), point(0.7, -0.2), 0.1, 50);
  REQUIRE(path.size() == 51);
  CHECK(path.back().q(0) == 0.7);
  CHECK(path.back().p(0) == -0.2);
}

TEST_CASE("integration of a constant field is exact") {
  // Field (b, -a) = (3, -1).
  const auto path = integrate(linear_model(1.0, 3.0), point(0.0, 0.0), 0.01, 100);
  CHECK(path.back().q(0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(path.back().p(0) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("rk4 on the harmonic field reaches the quarter period") {
  const auto field = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd f(2);
    f << x(1), -x(0);
    return f;
  };
  const double dt = 1e-3;
  const auto steps = static_cast<std::size_t>(std::llround(std::numbers::pi / 2.0 / dt));
  const double h = std::numbers::pi / 2.0 / static_cast<double>(steps);
  Eigen::VectorXd x(2);
  x << 1.0, 0.0;
  for (std::size_t i = 0; i < steps; ++i) x = rk4_step(field, x, h);
  CHECK(std::abs(x(0)) < 1e-4);
  CHECK(std::abs(x(1) + 1.0) < 1e-4);
}

TEST_CASE("integration reports the step where the state blows up") {
  const HamiltonianModel huge = linear_model(0.0, 1e308);
  try {
    integrate(huge, point(0.0, 0.0), 10.0, 5);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
  CHECK_THROWS(integrate(huge, point(0.0, 0.0), 0.0, 5));
  CHECK_THROWS(integrate(huge, point(0.0, 0.0), 0.1, 0));
}

TEST_CASE("record json round trip") {
  HnnRecord rec;
  rec.model = random_model(2);
  rec.sequence_id = "imbalance/10g/23.7568";
  rec.label = "imbalance";
  rec.final_loss = 1.25e-5;
  rec.config.hidden = {10, 10};
  rec.config.seed = 99;
  const HnnRecord back = hnn_record_from_json(nlohmann::json::parse(to_json(rec).dump()));
  CHECK(back.model == rec.model);
  CHECK(back.sequence_id == rec.sequence_id);
  CHECK(back.label == rec.label);
  CHECK(back.final_loss == rec.final_loss);
  CHECK(back.config.hidden == rec.config.hidden);
  CHECK(back.config.seed == 99);
}

}
