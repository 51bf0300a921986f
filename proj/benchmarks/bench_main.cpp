#include "hamfault/features.hpp"
#include "hamfault/forest.hpp"
#include "hamfault/hnn.hpp"
#include "hamfault/metrics.hpp"
#include "hamfault/random.hpp"

#include <benchmark/benchmark.h>

using namespace hamfault;

namespace {

TrainingPairs random_pairs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd states(2, static_cast<Eigen::Index>(n));
  Eigen::MatrixXd rates(2, static_cast<Eigen::Index>(n));
  for (Eigen::Index c = 0; c < states.cols(); ++c) {
    states.col(c) << rng.normal(), rng.normal();
    rates.col(c) << states(1, c), -states(0, c);
  }
  return {states, rates};
}

void BM_HnnLossGradient(benchmark::State& state) {
  const auto width = static_cast<std::size_t>(state.range(0));
  const std::size_t batch = static_cast<std::size_t>(state.range(1));
  HnnTrainConfig cfg;
  cfg.hidden = {width, width};
  HamiltonianModel model(init_params(hnn_spec(1, cfg)));
  const TrainingPairs pairs = random_pairs(batch, 7);
  for (auto _ : state) benchmark::DoNotOptimize(hnn_loss_gradient(model, pairs).loss);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_HnnLossGradient)->Args({32, 256})->Args({200, 256})->Args({200, 512});

void BM_PcaGram(benchmark::State& state) {
  Rng rng(3);
  Eigen::MatrixXd x(state.range(0), state.range(1));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(fit_pca(x, 30).components.data());
}
BENCHMARK(BM_PcaGram)->Args({60, 41001})->Args({200, 41001})->Unit(benchmark::kMillisecond);

void BM_RocAuc(benchmark::State& state) {
  Rng rng(5);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<int> y(n);
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(i % 2);
    s[i] = rng.normal() + y[i];
  }
  for (auto _ : state) benchmark::DoNotOptimize(roc_auc(y, s).auc);
}
BENCHMARK(BM_RocAuc)->Arg(1000)->Arg(100000);

void BM_RandomForest(benchmark::State& state) {
  Rng rng(11);
  const Eigen::Index n = state.range(0);
  Eigen::MatrixXd x(n, 30);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = static_cast<int>(i % 6);
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.normal() + 0.5 * y[static_cast<std::size_t>(i)];
  }
  ForestConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(train_random_forest(x, y, cfg).trees().size());
}
BENCHMARK(BM_RandomForest)->Arg(300)->Arg(1500)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
