// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/eval/importance.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "fairdistill/error.hpp"
#include "fairdistill/eval/fairness.hpp"
#include "fairdistill/rng.hpp"

namespace fairdistill::eval {

std::vector<std::string> classifier_input_owners(const data::TabularSchema& schema) {
  std::vector<std::string> owners(schema.encoded_width());
  for (const auto& b : schema.blocks()) {
    for (std::size_t i = 0; i < b.width; ++i) owners[b.offset + i] = schema.column(b.column).name;
  }
  const std::string& prot = schema.column(schema.protected_column()).name;
  for (std::size_t g = 0; g < schema.group_count(); ++g) owners.push_back(prot);
  return owners;
}

std::vector<FeatureImportance> aggregate_by_column(std::span<const double> per_input,
                                                   const std::vector<std::string>& owners) {
  if (per_input.size() != owners.size()) throw Error(ErrorCode::ShapeMismatch, "importance width != owner count");
  std::vector<FeatureImportance> out;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < owners.size(); ++i) {
    auto [it, fresh] = index.emplace(owners[i], out.size());
    if (fresh) out.push_back({owners[i], 0.0});
    out[it->second].importance += per_input[i];
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FeatureImportance& a, const FeatureImportance& b) { return a.importance > b.importance; });
  return out;
}

std::vector<FeatureImportance> impurity_importance(const TreeEnsemble& model, const data::TabularSchema& schema) {
  const std::vector<double> imp = model.impurity_importance();
  return aggregate_by_column(imp, classifier_input_owners(schema));
}

std::vector<FeatureImportance> permutation_importance(const TreeEnsemble& model, const data::Dataset& test,
                                                      int shuffles, std::uint64_t seed) {
  const std::vector<std::string> owners = classifier_input_owners(test.schema);
  const Eigen::MatrixXd base = test.features_with_group();
  const double reference = utility_scores(model.predict(base), test.y).accuracy;

  std::vector<std::string> columns;
  for (const auto& o : owners) {
    if (std::find(columns.begin(), columns.end(), o) == columns.end()) columns.push_back(o);
  }
  std::vector<double> per_input(owners.size(), 0.0);
  const auto n = static_cast<std::size_t>(base.rows());
  std::vector<std::size_t> perm(n);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::vector<Eigen::Index> cols;
    for (std::size_t i = 0; i < owners.size(); ++i) {
      if (owners[i] == columns[c]) cols.push_back(static_cast<Eigen::Index>(i));
    }
    Rng rng(derive_seed(seed, c));
    double drop = 0.0;
    for (int t = 0; t < shuffles; ++t) {
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      shuffle(std::span<std::size_t>(perm), rng);
      Eigen::MatrixXd shuffled = base;
      for (Eigen::Index col : cols) {
        for (std::size_t r = 0; r < n; ++r) {
          shuffled(static_cast<Eigen::Index>(r), col) = base(static_cast<Eigen::Index>(perm[r]), col);
        }
      }
      drop += reference - utility_scores(model.predict(shuffled), test.y).accuracy;
    }
    // Credit the whole column to its first input so aggregation sums it once.
    per_input[static_cast<std::size_t>(cols.front())] = shuffles > 0 ? drop / shuffles : 0.0;
  }
  return aggregate_by_column(per_input, owners);
}

ImportanceReport feature_importance(const TreeEnsemble& model, const data::Dataset& test, int shuffles,
                                    std::uint64_t seed) {
  return {impurity_importance(model, test.schema), permutation_importance(model, test, shuffles, seed)};
}

double importance_of(const std::vector<FeatureImportance>& ranked, const std::string& column) {
  for (const auto& f : ranked) {
    if (f.feature == column) return f.importance;
  }
  return 0.0;
}

}  // namespace fairdistill::eval
