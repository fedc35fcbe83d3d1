// SPDX-License-Identifier: Apache-2.0
#include <numeric>

#include <gtest/gtest.h>

#include "fairdistill/eval/fairness.hpp"
#include "fairdistill/eval/forest.hpp"
#include "fairdistill/eval/importance.hpp"
#include "fairdistill/rng.hpp"
#include "fixtures.hpp"

using namespace fairdistill;
using Eigen::MatrixXd;
using eval::ForestConfig;
using eval::TreeEnsemble;

namespace {

// Column 0 decides the label; columns 1 and 2 are noise; column 3 is constant.
void threshold_data(std::size_t n, std::uint64_t seed, MatrixXd& x, std::vector<int>& y) {
  Rng rng(seed);
  x.resize(static_cast<Eigen::Index>(n), 4);
  y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    x(r, 0) = uniform01(rng);
    x(r, 1) = uniform01(rng);
    x(r, 2) = standard_normal(rng);
    x(r, 3) = 0.25;
    y[i] = x(r, 0) > 0.6;
  }
}

ForestConfig small_forest(std::uint64_t seed = 3) {
  ForestConfig c;
  c.n_trees = 25;
  c.max_depth = 6;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Forest, LearnsThresholdRule) {
  MatrixXd x, xt;
  std::vector<int> y, yt;
  threshold_data(400, 1, x, y);
  threshold_data(200, 2, xt, yt);
  const auto f = TreeEnsemble::fit(x, y, small_forest());
  EXPECT_GT(eval::utility_scores(f.predict(xt), yt).accuracy, 0.95);
  EXPECT_FALSE(f.degenerate());
  EXPECT_EQ(f.trees().size(), 25u);
  EXPECT_EQ(f.feature_count(), 4u);
}

TEST(Forest, RespectsDepthLimit) {
  MatrixXd x;
  std::vector<int> y;
  threshold_data(300, 5, x, y);
  Rng rng(9);
  for (auto& v : y) v = uniform01(rng) < 0.5;  // pure noise forces deep trees
  auto cfg = small_forest();
  cfg.max_depth = 3;
  const auto f = TreeEnsemble::fit(x, y, cfg);
  for (const auto& t : f.trees()) EXPECT_LE(t.depth(), 3);
}

TEST(Forest, ImportanceNormalizedAndConcentrated) {
  MatrixXd x;
  std::vector<int> y;
  threshold_data(400, 1, x, y);
  const auto imp = TreeEnsemble::fit(x, y, small_forest()).impurity_importance();
  ASSERT_EQ(imp.size(), 4u);
  EXPECT_NEAR(std::accumulate(imp.begin(), imp.end(), 0.0), 1.0, 1e-12);
  for (double v : imp) EXPECT_GE(v, 0.0);
  EXPECT_GT(imp[0], 0.8);
  EXPECT_EQ(imp[3], 0.0);
}

TEST(Forest, DeterministicForSeed) {
  MatrixXd x;
  std::vector<int> y;
  threshold_data(200, 1, x, y);
  const auto a = TreeEnsemble::fit(x, y, small_forest(4));
  const auto b = TreeEnsemble::fit(x, y, small_forest(4));
  EXPECT_EQ(a.vote_share(x), b.vote_share(x));
  EXPECT_EQ(a.impurity_importance(), b.impurity_importance());
}

TEST(Forest, VoteShareBounded) {
  MatrixXd x;
  std::vector<int> y;
  threshold_data(150, 2, x, y);
  for (double v : TreeEnsemble::fit(x, y, small_forest()).vote_share(x)) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Forest, SingleClassIsDegenerate) {
  MatrixXd x;
  std::vector<int> y;
  threshold_data(50, 1, x, y);
  std::fill(y.begin(), y.end(), 1);
  const auto f = TreeEnsemble::fit(x, y, small_forest());
  EXPECT_TRUE(f.degenerate());
  for (int p : f.predict(x)) EXPECT_EQ(p, 1);
}

TEST(Forest, NoSplitGivesUniformImportance) {
  const MatrixXd x = MatrixXd::Ones(20, 3);
  std::vector<int> y(20);
  for (std::size_t i = 0; i < 20; ++i) y[i] = i % 2;
  const auto imp = TreeEnsemble::fit(x, y, small_forest()).impurity_importance();
  for (double v : imp) EXPECT_NEAR(v, 1.0 / 3.0, 1e-12);
}

TEST(Importance, OwnersFollowBlocksThenProtected) {
  const auto owners = eval::classifier_input_owners(fixtures::toy_schema());
  EXPECT_EQ(owners, (std::vector<std::string>{"age", "hours", "color", "color", "color", "sex", "sex"}));
}

TEST(Importance, AggregationSumsBlocksAndSorts) {
  const std::vector<std::string> owners{"a", "b", "b", "c"};
  const std::vector<double> per{0.1, 0.2, 0.3, 0.4};
  const auto agg = eval::aggregate_by_column(per, owners);
  ASSERT_EQ(agg.size(), 3u);
  EXPECT_EQ(agg[0].feature, "b");
  EXPECT_DOUBLE_EQ(agg[0].importance, 0.5);
  EXPECT_EQ(agg[2].feature, "a");
  EXPECT_DOUBLE_EQ(eval::importance_of(agg, "c"), 0.4);
  EXPECT_EQ(eval::importance_of(agg, "missing"), 0.0);
}

TEST(Importance, PermutationFindsTheDrivingColumns) {
  const auto train = fixtures::toy_dataset(800, 1);
  const auto test = fixtures::toy_dataset(300, 2);
  auto cfg = small_forest();
  cfg.n_trees = 40;
  const auto model = TreeEnsemble::fit(train.features_with_group(), train.y, cfg);
  const auto rep = eval::feature_importance(model, test, 3, 5);
  EXPECT_EQ(rep.impurity.size(), 4u);  // income is not an input
  EXPECT_EQ(rep.permutation.size(), 4u);
  double total = 0;
  for (const auto& f : rep.impurity) total += f.importance;
  EXPECT_NEAR(total, 1.0, 1e-12);
  // age and hours carry most of the signal in the toy generator
  EXPECT_GT(eval::importance_of(rep.impurity, "age"), eval::importance_of(rep.impurity, "color"));
  const auto again = eval::permutation_importance(model, test, 3, 5);
  for (std::size_t i = 0; i < again.size(); ++i) EXPECT_EQ(again[i].importance, rep.permutation[i].importance);
}
