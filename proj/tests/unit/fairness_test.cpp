// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "fairdistill/error.hpp"
#include "fairdistill/eval/fairness.hpp"
#include "fairdistill/rng.hpp"
#include "oracles.hpp"

using namespace fairdistill;
using eval::demographic_parity_ratio;
using eval::equalized_odds_ratio;

TEST(Fairness, HandComputedDemographicParity) {
  // group 0: 1 of 4 positive, group 1: 3 of 4
  const std::vector<int> y_hat{1, 0, 0, 0, 1, 1, 1, 0};
  const std::vector<int> s{0, 0, 0, 0, 1, 1, 1, 1};
  const auto r = demographic_parity_ratio(y_hat, s);
  EXPECT_DOUBLE_EQ(r.value, 1.0 / 3.0);
  EXPECT_FALSE(r.degenerate);
}

TEST(Fairness, HandComputedEqualizedOdds) {
  const std::vector<int> y{1, 1, 0, 0, 1, 1, 0, 0};
  const std::vector<int> y_hat{1, 1, 1, 0, 1, 0, 0, 0};
  const std::vector<int> s{0, 0, 0, 0, 1, 1, 1, 1};
  // TPR 1 vs 0.5, FPR 0.5 vs 0
  EXPECT_DOUBLE_EQ(equalized_odds_ratio(y_hat, y, s).value, 0.0);
  const std::vector<int> y_hat2{1, 1, 1, 0, 1, 0, 1, 0};
  EXPECT_DOUBLE_EQ(equalized_odds_ratio(y_hat2, y, s).value, 0.5);
}

TEST(Fairness, AgreesWithPairwiseOracle) {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 20 + uniform_index(rng, 60);
    const int groups = 2 + static_cast<int>(uniform_index(rng, 3));
    std::vector<int> y(n), y_hat(n), s(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(groups)));
      y[i] = uniform01(rng) < 0.4;
      y_hat[i] = uniform01(rng) < (y[i] ? 0.7 : 0.2);
    }
    y[0] = 1;
    y[1] = 0;
    const auto d = demographic_parity_ratio(y_hat, s);
    EXPECT_NEAR(d.value, oracle::dpr(y_hat, s), 1e-12);
    EXPECT_GE(d.value, 0.0);
    EXPECT_LE(d.value, 1.0);
    const auto e = equalized_odds_ratio(y_hat, y, s);
    EXPECT_NEAR(e.value, oracle::eor(y_hat, y, s), 1e-12);
    EXPECT_GE(e.value, 0.0);
    EXPECT_LE(e.value, 1.0);
  }
}

TEST(Fairness, InvariantToGroupRelabeling) {
  const std::vector<int> y_hat{1, 0, 1, 1, 0, 0, 1};
  const std::vector<int> y{1, 0, 0, 1, 1, 0, 1};
  const std::vector<int> s{0, 1, 2, 0, 1, 2, 0};
  const std::vector<int> t{2, 0, 1, 2, 0, 1, 2};
  EXPECT_DOUBLE_EQ(demographic_parity_ratio(y_hat, s).value, demographic_parity_ratio(y_hat, t).value);
  EXPECT_DOUBLE_EQ(equalized_odds_ratio(y_hat, y, s).value, equalized_odds_ratio(y_hat, y, t).value);
}

TEST(Fairness, EqualRatesGiveOne) {
  const std::vector<int> y_hat{1, 0, 1, 0};
  const std::vector<int> s{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(demographic_parity_ratio(y_hat, s).value, 1.0);
}

TEST(Fairness, AllZeroRatesAreFlagged) {
  const std::vector<int> y_hat{0, 0, 0, 0};
  const std::vector<int> y{1, 0, 1, 0};
  const std::vector<int> s{0, 0, 1, 1};
  const auto d = demographic_parity_ratio(y_hat, s);
  EXPECT_DOUBLE_EQ(d.value, 1.0);
  EXPECT_TRUE(d.degenerate);
  const auto e = equalized_odds_ratio(y_hat, y, s);
  EXPECT_DOUBLE_EQ(e.value, 1.0);
  EXPECT_TRUE(e.degenerate);
}

TEST(Fairness, EmptyStratumExcludesGroup) {
  // group 2 has no positives
  const std::vector<int> y{1, 0, 1, 0, 0, 0};
  const std::vector<int> y_hat{1, 0, 1, 1, 1, 0};
  const std::vector<int> s{0, 0, 1, 1, 2, 2};
  const auto e = equalized_odds_ratio(y_hat, y, s);
  EXPECT_EQ(e.excluded_groups, std::vector<int>{2});
}

TEST(Fairness, SingleGroupIsAnError) {
  const std::vector<int> y_hat{1, 0};
  const std::vector<int> s{1, 1};
  try {
    demographic_parity_ratio(y_hat, s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleGroup);
  }
}

TEST(Fairness, EqualizedOddsNeedsBothClasses) {
  const std::vector<int> y{1, 1};
  const std::vector<int> y_hat{1, 0};
  const std::vector<int> s{0, 1};
  EXPECT_THROW(equalized_odds_ratio(y_hat, y, s), Error);
}

TEST(Utility, HandComputedScores) {
  const std::vector<int> y{1, 1, 1, 0, 0};
  const std::vector<int> y_hat{1, 1, 0, 1, 0};
  const auto u = eval::utility_scores(y_hat, y);
  EXPECT_DOUBLE_EQ(u.accuracy, 0.6);
  EXPECT_DOUBLE_EQ(u.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(u.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(u.f1, 2.0 / 3.0);
}

TEST(Utility, NoPredictedPositives) {
  const std::vector<int> y{1, 0};
  const std::vector<int> y_hat{0, 0};
  const auto u = eval::utility_scores(y_hat, y);
  EXPECT_DOUBLE_EQ(u.precision, 0.0);
  EXPECT_DOUBLE_EQ(u.f1, 0.0);
  EXPECT_DOUBLE_EQ(u.accuracy, 0.5);
}
