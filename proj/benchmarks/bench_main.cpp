// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "fairdistill/eval/density_coverage.hpp"
#include "fairdistill/eval/forest.hpp"
#include "fairdistill/fairvae/distance_covariance.hpp"
#include "fairdistill/nn/mlp.hpp"
#include "fairdistill/nn/tape.hpp"
#include "fairdistill/rng.hpp"

using namespace fairdistill;
using Eigen::MatrixXd;

namespace {

MatrixXd normal(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  Rng rng(seed);
  return nn::standard_normal_matrix(r, c, rng);
}

MatrixXd onehot_groups(Eigen::Index n) {
  MatrixXd s = MatrixXd::Zero(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) s(i, i % 3 == 0 ? 1 : 0) = 1.0;
  return s;
}

void BM_DistanceCovariance(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const MatrixXd z = normal(n, 8, 1), s = onehot_groups(n);
  for (auto _ : state) benchmark::DoNotOptimize(fairvae::distance_covariance_sq(z, s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DistanceCovariance)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNSquared);

void BM_DistanceCovarianceBackward(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const MatrixXd s = onehot_groups(n);
  nn::Parameter z{"z", normal(n, 8, 1), MatrixXd::Zero(n, 8)};
  for (auto _ : state) {
    nn::Tape tape;
    const nn::Var v = fairvae::distance_covariance_sq(tape.parameter(z), s);
    tape.backward(v);
    benchmark::DoNotOptimize(z.grad.data());
  }
}
BENCHMARK(BM_DistanceCovarianceBackward)->Arg(256);

void BM_MlpForwardBackward(benchmark::State& state) {
  Rng rng(3);
  const std::size_t widths[] = {110, 64, 64, 16};
  nn::Mlp net = nn::Mlp::create(widths, nn::Activation::Relu, nn::Activation::Identity, rng);
  const MatrixXd x = normal(256, 110, 2);
  for (auto _ : state) {
    nn::Tape tape;
    const nn::Var out = net.forward(tape, tape.constant(x));
    const nn::Var loss = nn::sum(out);
    tape.backward(loss);
    benchmark::DoNotOptimize(loss.scalar());
  }
}
BENCHMARK(BM_MlpForwardBackward);

void BM_ForestFit(benchmark::State& state) {
  const MatrixXd x = normal(2000, 20, 4);
  std::vector<int> y(2000);
  for (Eigen::Index i = 0; i < 2000; ++i) y[static_cast<std::size_t>(i)] = x(i, 0) + 0.5 * x(i, 3) > 0.2;
  eval::ForestConfig cfg;
  cfg.n_trees = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eval::TreeEnsemble::fit(x, y, cfg).trees().size());
}
BENCHMARK(BM_ForestFit)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_DensityCoverage(benchmark::State& state) {
  const MatrixXd real = normal(1000, 12, 5), synth = normal(1000, 12, 6);
  for (auto _ : state) benchmark::DoNotOptimize(eval::density_coverage(real, synth, 5).coverage);
}
BENCHMARK(BM_DensityCoverage)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
