// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace fairdistill::eval {

struct RatioResult {
  double value = 1.0;
  /// Set when every compared rate was zero and the ratio was defined as 1.
  bool degenerate = false;
  /// Groups dropped because a stratum they needed was empty.
  std::vector<int> excluded_groups;
};

/// min over groups of P[y_hat = 1 | s] divided by the max. Only groups that
/// occur in s are compared. Throws SingleGroup when fewer than two occur.
RatioResult demographic_parity_ratio(std::span<const int> y_hat, std::span<const int> s);

/// Worse of the TPR ratio and the FPR ratio, each min/max over groups.
/// A group with no positives (negatives) is excluded from the TPR (FPR)
/// comparison and reported. Throws SingleGroup, and InvalidArgument when
/// y holds a single class.
RatioResult equalized_odds_ratio(std::span<const int> y_hat, std::span<const int> y, std::span<const int> s);

struct UtilityScores {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Positive class is 1. Recall is 0 with no positives in y; f1 is 0 when
/// precision + recall is 0.
UtilityScores utility_scores(std::span<const int> y_hat, std::span<const int> y);

}  // namespace fairdistill::eval
