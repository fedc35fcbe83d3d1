// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairdistill/data/split.hpp"
#include "fairdistill/eval/report.hpp"
#include "fairdistill/pipeline/config.hpp"
#include "fairdistill/pipeline/manifest.hpp"

namespace fairdistill::pipeline {

enum class Stage { TrainTeacher, Distill, Generate, Evaluate };

std::string stage_name(Stage s);
const std::vector<Stage>& stage_order();

struct RunOptions {
  /// Skip stages whose recorded artifacts are intact; the stored config
  /// hash must match (ManifestMismatch otherwise).
  bool resume = false;
  std::ostream* log = nullptr;
};

/// Loads the dataset and applies the seeded 80/20 split.
struct PreparedData {
  data::Dataset full;
  data::SplitPair split;
};
PreparedData prepare_data(const RunConfig& cfg);

/// Runs train-teacher, distill, generate and evaluate into
/// cfg.output_dir. The manifest is rewritten after every stage, so a failed
/// run keeps what finished. Stage errors are rethrown as StageFailure with
/// the stage name in the message.
RunManifest run_pipeline(const RunConfig& cfg, const RunOptions& opts = {});

/// Runs one stage. Earlier stages must already be recorded in the run
/// directory's manifest under the same config hash; later records are
/// dropped because they no longer follow from the new output.
RunManifest run_stage(const RunConfig& cfg, Stage stage, const RunOptions& opts = {});

enum class SweepAxis { Lambda, Beta, LossKind };
std::string to_string(SweepAxis a);
/// "lambda", "beta", "loss-kind"; throws ConfigError otherwise.
SweepAxis sweep_axis_from_string(const std::string& name);
/// lambda and beta: 1..10; loss-kind: l1, mse, huber, mean-difference.
std::vector<std::string> default_sweep_values(SweepAxis a);

struct SweepCell {
  std::string value;
  std::string status = "ok";  ///< "ok" or the failure message
  std::string teacher_hash;
  std::optional<eval::EvalReport> report;
  double train_ms = 0.0;
  std::filesystem::path run_dir;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::Lambda;
  std::vector<SweepCell> cells;

  /// One row per cell; metric columns are <name>_mean and <name>_std for
  /// every EvalReport metric, in report order.
  std::vector<std::string> csv_header() const;
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Runs the pipeline once per axis value under cfg.output_dir/<axis>-<value>.
/// Lambda and loss-kind cells share one teacher trained under
/// cfg.output_dir/teacher. A failing cell is recorded and the sweep goes
/// on. Writes sweep.csv and sweep.json into cfg.output_dir.
SweepResult run_sweep(const RunConfig& cfg, SweepAxis axis, std::vector<std::string> values = {},
                      const RunOptions& opts = {});

struct ReportRow {
  std::string run;
  std::string label;  ///< quality loss, lambda and beta of the run
  eval::EvalReport report;
  double train_ms = 0.0;  ///< teacher + distill wall-clock
  double relative_time = 0.0;  ///< (t_this - t_first) / t_first
};

struct ConsolidatedReport {
  std::vector<ReportRow> rows;

  /// Markdown table with "mean ± std" cells and the relative timing column.
  std::string to_markdown() const;
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Merges finished runs; the first run is the timing reference. Throws
/// ManifestMismatch when manifests fail their audit or schemas differ.
ConsolidatedReport consolidate_runs(const std::vector<std::filesystem::path>& run_dirs);

}  // namespace fairdistill::pipeline
