// SPDX-License-Identifier: Apache-2.0
// fairdistill: command-line driver for the teacher/student pipeline.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairdistill/error.hpp"
#include "fairdistill/pipeline/pipeline.hpp"

namespace fs = std::filesystem;
using namespace fairdistill;

namespace {

constexpr int kConfigExit = 2;
constexpr int kStageExit = 3;

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool resume = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory (overrides output_dir)");
  cmd->add_option("--seed", f.seed, "run seed (overrides seed)");
  cmd->add_flag("--resume", f.resume, "reuse intact artifacts from an earlier run with the same config");
}

pipeline::RunConfig load_config(const CommonFlags& f) {
  pipeline::RunConfig cfg = pipeline::RunConfig::load(f.config);
  if (!f.out.empty()) cfg.output_dir = fs::absolute(f.out);
  if (f.seed) cfg.set_seed(*f.seed);
  cfg.validate();
  return cfg;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidConfig:
    case ErrorCode::ManifestMismatch:
      return kConfigExit;
    default:
      return kStageExit;
  }
}

void print_summary(const pipeline::RunManifest& m, const fs::path& dir) {
  std::cout << "run directory: " << dir.string() << "\n";
  for (const auto& s : pipeline::stage_order()) {
    const std::string name = pipeline::stage_name(s);
    auto it = m.stages.find(name);
    if (it == m.stages.end()) continue;
    std::cout << "  " << name << ": " << it->second.artifacts.size() << " artifact(s), " << it->second.wall_ms
              << " ms\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair synthetic tabular data via a distilled fair latent space"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pipeline::kToolVersion);

  CommonFlags common;
  CLI::App* pipe = app.add_subcommand("pipeline", "train-teacher, distill, generate and evaluate in one go");
  add_common(pipe, common);

  struct StageCmd {
    CLI::App* cmd;
    pipeline::Stage stage;
  };
  std::vector<StageCmd> stage_cmds;
  for (pipeline::Stage s : pipeline::stage_order()) {
    CLI::App* cmd = app.add_subcommand(pipeline::stage_name(s), "run only the " + pipeline::stage_name(s) + " stage");
    add_common(cmd, common);
    stage_cmds.push_back({cmd, s});
  }

  std::string axis;
  std::vector<std::string> values;
  CLI::App* sweep = app.add_subcommand("sweep", "run the pipeline across one hyperparameter axis");
  add_common(sweep, common);
  sweep->add_option("--axis", axis, "lambda, beta or loss-kind")->required();
  sweep->add_option("--values", values, "axis values (default: 1..10, or all loss kinds)")->delimiter(',');

  std::vector<std::string> run_dirs;
  std::string report_out;
  CLI::App* report = app.add_subcommand("report", "merge finished runs into one comparison table");
  report->add_option("runs", run_dirs, "run directories")->required()->check(CLI::ExistingDirectory);
  report->add_option("--out", report_out, "also write report.csv and report.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    pipeline::RunOptions opts;
    opts.resume = common.resume;
    opts.log = &std::cerr;

    if (*pipe) {
      const auto cfg = load_config(common);
      print_summary(pipeline::run_pipeline(cfg, opts), cfg.output_dir);
      return 0;
    }
    for (const auto& sc : stage_cmds) {
      if (*sc.cmd) {
        const auto cfg = load_config(common);
        print_summary(pipeline::run_stage(cfg, sc.stage, opts), cfg.output_dir);
        return 0;
      }
    }
    if (*sweep) {
      const auto cfg = load_config(common);
      const auto result = pipeline::run_sweep(cfg, pipeline::sweep_axis_from_string(axis), values, opts);
      std::cout << result.to_csv();
      for (const auto& c : result.cells) {
        if (c.status != "ok") return kStageExit;
      }
      return 0;
    }
    if (*report) {
      std::vector<fs::path> dirs(run_dirs.begin(), run_dirs.end());
      const auto merged = pipeline::consolidate_runs(dirs);
      std::cout << merged.to_markdown();
      if (!report_out.empty()) {
        fs::create_directories(report_out);
        pipeline::write_file(fs::path(report_out) / "report.csv", merged.to_csv());
        pipeline::write_file(fs::path(report_out) / "report.json", merged.to_json().dump(2) + "\n");
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "fairdistill: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "fairdistill: " << e.what() << "\n";
    return kStageExit;
  }
  return kConfigExit;
}
