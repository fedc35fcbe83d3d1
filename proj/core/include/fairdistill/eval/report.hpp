// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairdistill/data/dataset.hpp"
#include "fairdistill/eval/forest.hpp"
#include "fairdistill/eval/importance.hpp"
#include "fairdistill/eval/pca.hpp"

namespace fairdistill::eval {

struct EvalConfig {
  int repetitions = 10;
  ForestConfig forest;
  int k_nn = 5;
  /// Density/coverage compares at most this many rows from each side,
  /// subsampled afresh for every repetition. 0 means all rows.
  std::size_t max_points = 2000;
  int permutation_shuffles = 5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation; 0 for one repetition
  std::vector<double> values;
};

MetricSummary summarize(std::vector<double> values);

/// Metric names in report order.
const std::vector<std::string>& metric_names();

struct EvalReport {
  int repetitions = 0;
  std::map<std::string, MetricSummary> metrics;
  std::vector<std::string> flags;
  std::vector<FeatureImportance> impurity_importance;     ///< mean over repetitions
  std::vector<FeatureImportance> permutation_importance;  ///< mean over repetitions
  std::string protected_column;
  /// Wall-clock per stage in milliseconds. Kept out of to_json() so metric
  /// files stay byte-identical between identical runs.
  std::map<std::string, double> timings_ms;

  const MetricSummary& metric(const std::string& name) const;

  nlohmann::json to_json() const;
  nlohmann::json timings_json() const;
  static EvalReport from_json(const nlohmann::json& j);
};

/// Trains the forest on `train` ([X | onehot(s)] -> y), predicts the real
/// test split and scores fairness and utility; compares X of `train`
/// against X of `real_test` with density/coverage; repeats with distinct
/// seeds. `train` is the synthetic data, or real training data for a
/// baseline. Throws SchemaMismatch when the schemas differ.
EvalReport evaluate_pipeline(const data::Dataset& real_test, const data::Dataset& train, const EvalConfig& cfg);

/// CSV with columns pc1..pcD,group (group as category name).
void write_pca_csv(const std::filesystem::path& path, const PcaResult& pca, std::span<const int> s,
                   const std::vector<std::string>& group_names);

}  // namespace fairdistill::eval
