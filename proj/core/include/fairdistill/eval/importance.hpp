// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fairdistill/data/dataset.hpp"
#include "fairdistill/eval/forest.hpp"

namespace fairdistill::eval {

struct FeatureImportance {
  std::string feature;
  double importance = 0.0;
};

/// Name of the schema column behind each classifier input column. The
/// classifier sees [X | onehot(s)], so the protected column comes last.
std::vector<std::string> classifier_input_owners(const data::TabularSchema& schema);

/// Sums per-input values into their owning columns and sorts descending;
/// equal values keep schema order.
std::vector<FeatureImportance> aggregate_by_column(std::span<const double> per_input,
                                                   const std::vector<std::string>& owners);

/// Impurity importance per original column; sums to 1.
std::vector<FeatureImportance> impurity_importance(const TreeEnsemble& model, const data::TabularSchema& schema);

/// Mean accuracy drop over `shuffles` row permutations of each original
/// column's block (all of its one-hot cells move together).
std::vector<FeatureImportance> permutation_importance(const TreeEnsemble& model, const data::Dataset& test,
                                                      int shuffles, std::uint64_t seed);

struct ImportanceReport {
  std::vector<FeatureImportance> impurity;
  std::vector<FeatureImportance> permutation;
};

ImportanceReport feature_importance(const TreeEnsemble& model, const data::Dataset& test, int shuffles = 5,
                                    std::uint64_t seed = 0);

/// Importance of a named column in a ranked list; 0 if absent.
double importance_of(const std::vector<FeatureImportance>& ranked, const std::string& column);

}  // namespace fairdistill::eval
