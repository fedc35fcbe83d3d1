// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/eval/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "fairdistill/data/csv.hpp"
#include "fairdistill/error.hpp"
#include "fairdistill/eval/density_coverage.hpp"
#include "fairdistill/eval/fairness.hpp"
#include "fairdistill/rng.hpp"

namespace fairdistill::eval {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) { return std::chrono::duration<double, std::milli>(Clock::now() - t).count(); }

Eigen::MatrixXd sample_rows(const Eigen::MatrixXd& m, std::size_t cap, Rng& rng) {
  const auto n = static_cast<std::size_t>(m.rows());
  if (cap == 0 || n <= cap) return m;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  shuffle(std::span<std::size_t>(idx), rng);
  idx.resize(cap);
  std::sort(idx.begin(), idx.end());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(cap), m.cols());
  for (std::size_t i = 0; i < cap; ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

void add_into(std::map<std::string, double>& acc, const std::vector<FeatureImportance>& list) {
  for (const auto& f : list) acc[f.feature] += f.importance;
}

std::vector<FeatureImportance> averaged(const std::map<std::string, double>& acc, const data::TabularSchema& schema,
                                        int reps) {
  std::vector<FeatureImportance> out;
  for (const auto& c : schema.columns()) {
    if (c.role == data::ColumnRole::Target) continue;
    auto it = acc.find(c.name);
    out.push_back({c.name, it == acc.end() ? 0.0 : it->second / reps});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FeatureImportance& a, const FeatureImportance& b) { return a.importance > b.importance; });
  return out;
}

nlohmann::json importance_json(const std::vector<FeatureImportance>& list) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& f : list) out.push_back({{"feature", f.feature}, {"importance", f.importance}});
  return out;
}

std::vector<FeatureImportance> importance_from_json(const nlohmann::json& j) {
  std::vector<FeatureImportance> out;
  for (const auto& e : j) out.push_back({e.at("feature").get<std::string>(), e.at("importance").get<double>()});
  return out;
}

}  // namespace

void EvalConfig::validate() const {
  if (repetitions < 1) throw Error(ErrorCode::InvalidConfig, "repetitions must be >= 1");
  if (k_nn < 1) throw Error(ErrorCode::InvalidConfig, "k_nn must be >= 1");
  if (permutation_shuffles < 0) throw Error(ErrorCode::InvalidConfig, "permutation_shuffles must be >= 0");
  if (forest.n_trees < 1 || forest.max_depth < 0 || forest.min_samples_split < 2 || forest.mtry < 0) {
    throw Error(ErrorCode::InvalidConfig, "invalid forest settings");
  }
}

MetricSummary summarize(std::vector<double> values) {
  MetricSummary m;
  m.values = std::move(values);
  if (m.values.empty()) return m;
  const double n = static_cast<double>(m.values.size());
  m.mean = std::accumulate(m.values.begin(), m.values.end(), 0.0) / n;
  if (m.values.size() > 1) {
    double ss = 0.0;
    for (double v : m.values) ss += (v - m.mean) * (v - m.mean);
    m.std = std::sqrt(ss / (n - 1.0));
  }
  return m;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"dpr", "eor", "accuracy", "recall", "f1", "density", "coverage"};
  return names;
}

const MetricSummary& EvalReport::metric(const std::string& name) const {
  auto it = metrics.find(name);
  if (it == metrics.end()) throw Error(ErrorCode::InvalidArgument, "report has no metric '" + name + "'");
  return it->second;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json m = nlohmann::json::object();
  for (const auto& name : metric_names()) {
    auto it = metrics.find(name);
    if (it == metrics.end()) {
      m[name] = "n/a";
      continue;
    }
    m[name] = {{"mean", it->second.mean}, {"std", it->second.std}, {"values", it->second.values}};
  }
  return {{"repetitions", repetitions},
          {"metrics", m},
          {"flags", flags},
          {"protected_column", protected_column},
          {"importance",
           {{"impurity", importance_json(impurity_importance)},
            {"permutation", importance_json(permutation_importance)}}}};
}

nlohmann::json EvalReport::timings_json() const { return timings_ms; }

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  EvalReport r;
  r.repetitions = j.at("repetitions").get<int>();
  for (const auto& [name, v] : j.at("metrics").items()) {
    if (!v.is_object()) continue;
    MetricSummary s;
    s.mean = v.at("mean").get<double>();
    s.std = v.at("std").get<double>();
    s.values = v.at("values").get<std::vector<double>>();
    r.metrics[name] = s;
  }
  r.flags = j.value("flags", std::vector<std::string>{});
  r.protected_column = j.value("protected_column", "");
  if (j.contains("importance")) {
    r.impurity_importance = importance_from_json(j["importance"].at("impurity"));
    r.permutation_importance = importance_from_json(j["importance"].at("permutation"));
  }
  return r;
}

EvalReport evaluate_pipeline(const data::Dataset& real_test, const data::Dataset& train, const EvalConfig& cfg) {
  cfg.validate();
  if (!(real_test.schema == train.schema)) throw Error(ErrorCode::SchemaMismatch, "test and training schemas differ");
  if (train.rows() == 0 || real_test.rows() == 0) throw Error(ErrorCode::InvalidArgument, "evaluation needs data");

  EvalReport report;
  report.repetitions = cfg.repetitions;
  report.protected_column = real_test.schema.column(real_test.schema.protected_column()).name;
  const Eigen::MatrixXd train_x = train.features_with_group();
  const Eigen::MatrixXd test_x = real_test.features_with_group();

  std::map<std::string, std::vector<double>> values;
  std::map<std::string, double> impurity_acc, permutation_acc;
  double forest_ms = 0.0, fairness_ms = 0.0, dc_ms = 0.0, importance_ms = 0.0;
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    const std::string tag = " (repetition " + std::to_string(rep) + ")";
    const std::uint64_t rep_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep));
    auto t0 = Clock::now();
    ForestConfig fc = cfg.forest;
    fc.seed = derive_seed(rep_seed, 1);
    const TreeEnsemble forest = TreeEnsemble::fit(train_x, train.y, fc);
    if (forest.degenerate()) report.flags.push_back("forest: single-class training target" + tag);
    const std::vector<int> pred = forest.predict(test_x);
    forest_ms += ms_since(t0);

    t0 = Clock::now();
    const RatioResult dpr = demographic_parity_ratio(pred, real_test.s);
    if (dpr.degenerate) report.flags.push_back("dpr: all selection rates zero, defined as 1" + tag);
    const RatioResult eor = equalized_odds_ratio(pred, real_test.y, real_test.s);
    if (eor.degenerate) report.flags.push_back("eor: all rates zero, defined as 1" + tag);
    if (!eor.excluded_groups.empty()) report.flags.push_back("eor: groups with empty strata excluded" + tag);
    const UtilityScores u = utility_scores(pred, real_test.y);
    values["dpr"].push_back(dpr.value);
    values["eor"].push_back(eor.value);
    values["accuracy"].push_back(u.accuracy);
    values["recall"].push_back(u.recall);
    values["f1"].push_back(u.f1);
    fairness_ms += ms_since(t0);

    t0 = Clock::now();
    Rng dc_rng(derive_seed(rep_seed, 2));
    const Eigen::MatrixXd real_pts = sample_rows(real_test.x, cfg.max_points, dc_rng);
    const Eigen::MatrixXd synth_pts = sample_rows(train.x, cfg.max_points, dc_rng);
    if (real_pts.rows() > cfg.k_nn) {
      const DensityCoverage dc = density_coverage(real_pts, synth_pts, cfg.k_nn);
      values["density"].push_back(dc.density);
      values["coverage"].push_back(dc.coverage);
    }
    dc_ms += ms_since(t0);

    t0 = Clock::now();
    add_into(impurity_acc, impurity_importance(forest, real_test.schema));
    if (cfg.permutation_shuffles > 0) {
      add_into(permutation_acc,
               permutation_importance(forest, real_test, cfg.permutation_shuffles, derive_seed(rep_seed, 3)));
    }
    importance_ms += ms_since(t0);
  }
  for (auto& [name, v] : values) report.metrics[name] = summarize(std::move(v));
  if (!report.metrics.contains("density")) report.flags.push_back("density/coverage: too few real points");
  report.impurity_importance = averaged(impurity_acc, real_test.schema, cfg.repetitions);
  if (cfg.permutation_shuffles > 0) {
    report.permutation_importance = averaged(permutation_acc, real_test.schema, cfg.repetitions);
  }
  report.timings_ms = {{"forest", forest_ms},
                       {"fairness_utility", fairness_ms},
                       {"density_coverage", dc_ms},
                       {"importance", importance_ms}};
  return report;
}

void write_pca_csv(const std::filesystem::path& path, const PcaResult& pca, std::span<const int> s,
                   const std::vector<std::string>& group_names) {
  if (static_cast<std::size_t>(pca.projection.rows()) != s.size()) {
    throw Error(ErrorCode::ShapeMismatch, "pca rows != group labels");
  }
  data::CsvTable t;
  for (Eigen::Index c = 0; c < pca.projection.cols(); ++c) t.header.push_back("pc" + std::to_string(c + 1));
  t.header.push_back("group");
  for (Eigen::Index r = 0; r < pca.projection.rows(); ++r) {
    data::CsvRow row;
    for (Eigen::Index c = 0; c < pca.projection.cols(); ++c) {
      row.push_back(data::format_numeric(pca.projection(r, c), false));
    }
    row.push_back(group_names.at(static_cast<std::size_t>(s[static_cast<std::size_t>(r)])));
    t.rows.push_back(std::move(row));
  }
  data::write_csv(path, t);
}

}  // namespace fairdistill::eval
