// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "fairdistill/error.hpp"
#include "fairdistill/eval/density_coverage.hpp"
#include "fairdistill/nn/mlp.hpp"
#include "oracles.hpp"

using namespace fairdistill;
using Eigen::MatrixXd;

namespace {

MatrixXd gaussian(Eigen::Index n, Eigen::Index d, std::uint64_t seed, double shift = 0.0) {
  Rng rng(seed);
  return (nn::standard_normal_matrix(n, d, rng).array() + shift).matrix();
}

}  // namespace

TEST(DensityCoverage, HandComputedLine) {
  // real on a line at 0, 1, 2, 3; k = 1 gives radius 1 everywhere
  MatrixXd real(4, 1);
  real << 0, 1, 2, 3;
  MatrixXd synth(2, 1);
  synth << 0.5, 10;
  const auto r = eval::density_coverage(real, synth, 1);
  EXPECT_DOUBLE_EQ(r.density, 1.0);  // 0.5 lies in the balls of 0 and 1
  EXPECT_DOUBLE_EQ(r.coverage, 0.5);
}

TEST(DensityCoverage, MatchesBruteForceOracle) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const MatrixXd real = gaussian(40, 3, seed);
    const MatrixXd synth = gaussian(30, 3, seed + 50, seed % 3 == 0 ? 1.0 : 0.0);
    for (int k : {1, 3, 5}) {
      const auto got = eval::density_coverage(real, synth, k);
      const auto c = oracle::density_coverage_counts(real, synth, k);
      EXPECT_DOUBLE_EQ(got.density, c.inside / (k * 30.0));
      EXPECT_DOUBLE_EQ(got.coverage, c.covered / 40.0);
    }
  }
}

TEST(DensityCoverage, CopyOfRealCoversEverything) {
  const MatrixXd real = gaussian(50, 4, 3);
  const auto r = eval::density_coverage(real, real, 5);
  EXPECT_DOUBLE_EQ(r.coverage, 1.0);
  EXPECT_GE(r.density, 1.0);
}

TEST(DensityCoverage, FarAwaySyntheticScoresZero) {
  const auto r = eval::density_coverage(gaussian(30, 2, 1), gaussian(30, 2, 2, 100.0), 5);
  EXPECT_EQ(r.density, 0.0);
  EXPECT_EQ(r.coverage, 0.0);
}

TEST(DensityCoverage, InvariantToRowOrder) {
  const MatrixXd real = gaussian(30, 2, 1), synth = gaussian(25, 2, 2);
  const MatrixXd real_rev = real.colwise().reverse(), synth_rev = synth.colwise().reverse();
  const auto a = eval::density_coverage(real, synth, 4);
  const auto b = eval::density_coverage(real_rev, synth_rev, 4);
  EXPECT_DOUBLE_EQ(a.density, b.density);
  EXPECT_DOUBLE_EQ(a.coverage, b.coverage);
}

TEST(DensityCoverage, CoverageIsBounded) {
  const auto r = eval::density_coverage(gaussian(30, 2, 1), gaussian(60, 2, 2, 0.5), 5);
  EXPECT_GE(r.coverage, 0.0);
  EXPECT_LE(r.coverage, 1.0);
  EXPECT_GE(r.density, 0.0);
}

TEST(DensityCoverage, TooFewRealPoints) {
  try {
    eval::density_coverage(gaussian(5, 2, 1), gaussian(5, 2, 2), 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewRealPoints);
  }
}
