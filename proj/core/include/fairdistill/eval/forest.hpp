// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fairdistill::eval {

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 12;
  int mtry = 0;  ///< features tried per split; 0 means ceil(sqrt(d))
  int min_samples_split = 2;
  std::uint64_t seed = 0;
};

/// Binary classification tree with Gini splits on `x <= threshold`.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  ///< -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double p1 = 0.0;  ///< fraction of class 1 among training rows at the node
  };

  double predict_proba(const double* row) const;
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  int depth() const;

 private:
  friend class TreeEnsemble;
  std::vector<Node> nodes_;
};

/// Random forest: bootstrap rows per tree, random feature subset per split,
/// majority vote (ties broken by mean leaf probability).
class TreeEnsemble {
 public:
  static TreeEnsemble fit(const Eigen::MatrixXd& x, std::span<const int> y, const ForestConfig& cfg);

  std::vector<int> predict(const Eigen::MatrixXd& x) const;
  /// Fraction of trees voting for class 1.
  std::vector<double> vote_share(const Eigen::MatrixXd& x) const;

  /// Mean decrease in Gini impurity per input column, each tree normalized
  /// to 1 before averaging, then renormalized to sum 1. Uniform when no
  /// tree split.
  std::vector<double> impurity_importance() const;

  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
  std::size_t feature_count() const noexcept { return features_; }
  /// True when the training labels held a single class; the forest then
  /// predicts that class everywhere.
  bool degenerate() const noexcept { return degenerate_; }

 private:
  std::vector<DecisionTree> trees_;
  std::vector<std::vector<double>> tree_importance_;
  std::size_t features_ = 0;
  bool degenerate_ = false;
};

}  // namespace fairdistill::eval
