// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/pipeline/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fairdistill/data/csv.hpp"
#include "fairdistill/distill/student.hpp"
#include "fairdistill/error.hpp"
#include "fairdistill/eval/pca.hpp"
#include "fairdistill/fairvae/teacher.hpp"
#include "fairdistill/generate/generate.hpp"
#include "fairdistill/nn/checkpoint.hpp"
#include "fairdistill/rng.hpp"

namespace fairdistill::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

constexpr const char* kTeacherCkpt = "teacher.ckpt.json";
constexpr const char* kTeacherTrace = "teacher_trace.json";
constexpr const char* kStudentCkpt = "student.ckpt.json";
constexpr const char* kStudentTrace = "student_trace.json";
constexpr const char* kSynthetic = "synthetic.csv";
constexpr const char* kReport = "report.json";
constexpr const char* kBaseline = "baseline_report.json";
constexpr const char* kPcaTeacher = "pca_teacher.csv";
constexpr const char* kPcaStudent = "pca_student.csv";
constexpr const char* kTimings = "timings.json";
constexpr const char* kConfigCopy = "config.json";

double ms_since(Clock::time_point t) { return std::chrono::duration<double, std::milli>(Clock::now() - t).count(); }

std::vector<double> to_ms(const std::vector<double>& seconds) {
  std::vector<double> out;
  for (double s : seconds) out.push_back(s * 1000.0);
  return out;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

struct Context {
  const RunConfig& cfg;
  fs::path dir;
  RunManifest manifest;
  std::ostream* log = nullptr;
  std::optional<PreparedData> data;
  std::optional<fairvae::TeacherModel> teacher;
  std::optional<distill::StudentModel> student;

  void say(const std::string& msg) const {
    if (log) *log << msg << '\n' << std::flush;
  }

  const PreparedData& prepared() {
    if (!data) data = prepare_data(cfg);
    return *data;
  }

  const fairvae::TeacherModel& get_teacher() {
    if (!teacher) {
      teacher = fairvae::TeacherModel::from_checkpoint(
          nn::load_checkpoint(manifest.artifact(dir, stage_name(Stage::TrainTeacher), "teacher")));
    }
    return *teacher;
  }

  const distill::StudentModel& get_student() {
    if (!student) {
      student = distill::StudentModel::from_checkpoint(
          nn::load_checkpoint(manifest.artifact(dir, stage_name(Stage::Distill), "student")));
    }
    return *student;
  }

  Artifact write_text(const std::string& rel, const std::string& text) const {
    write_file(dir / rel, text);
    return {rel, nn::fnv1a_hex(text)};
  }

  Artifact record(const std::string& rel) const { return {rel, file_hash(dir / rel)}; }

  void merge_timings(const std::string& stage, json entry) const {
    json all = json::object();
    const fs::path p = dir / kTimings;
    if (fs::exists(p)) {
      try {
        all = json::parse(read_file(p));
      } catch (const json::exception&) {
        all = json::object();
      }
    }
    all["unit"] = "ms";
    all[stage] = std::move(entry);
    write_file(p, all.dump(2) + "\n");
  }
};

std::map<std::string, Artifact> teacher_stage(Context& ctx, json& timing) {
  const PreparedData& pd = ctx.prepared();
  fairvae::TeacherResult res = fairvae::train_teacher(pd.split.train, ctx.cfg.teacher);
  nn::save_checkpoint(ctx.dir / kTeacherCkpt, res.model.to_checkpoint());

  json trace = json::array();
  for (const auto& e : res.trace) {
    trace.push_back({{"epoch", e.epoch}, {"recon", e.recon}, {"kl", e.kl}, {"v2", e.v2}, {"total", e.total}});
  }
  const double test_v2 = fairvae::mean_batch_v2(res.model, pd.split.test, ctx.cfg.teacher.batch_size,
                                                derive_seed(ctx.cfg.teacher.seed, 7));
  const json doc = {{"trace", trace}, {"test_v2", test_v2}};
  ctx.teacher = std::move(res.model);
  const std::vector<double> epoch_ms = to_ms(res.epoch_seconds);
  timing["epoch_ms"] = epoch_ms;
  timing["epoch_ms_mean"] = mean_of(epoch_ms);
  return {{"teacher", ctx.record(kTeacherCkpt)}, {"trace", ctx.write_text(kTeacherTrace, doc.dump(2) + "\n")}};
}

std::map<std::string, Artifact> distill_stage(Context& ctx, json& timing) {
  const PreparedData& pd = ctx.prepared();
  const fairvae::TeacherModel& teacher = ctx.get_teacher();
  const std::uint64_t gap_seed = derive_seed(ctx.cfg.student.seed, 7);
  distill::StudentModel initial = distill::make_student(teacher, ctx.cfg.student);
  const double gap_before = distill::mean_abs_latent_gap(teacher, initial, pd.split.test, gap_seed);
  distill::DistillResult res = distill::distill_student(pd.split.train, teacher, std::move(initial), ctx.cfg.student);
  const double gap_after = distill::mean_abs_latent_gap(teacher, res.student, pd.split.test, gap_seed);
  nn::save_checkpoint(ctx.dir / kStudentCkpt, res.student.to_checkpoint());

  json epochs = json::array();
  for (const auto& e : res.trace) {
    epochs.push_back({{"epoch", e.epoch}, {"quality", e.quality}, {"kl", e.kl}, {"total", e.total}});
  }
  json steps = json::array();
  for (const auto& s : res.steps) steps.push_back({{"quality", s.quality}, {"kl", s.kl}, {"total", s.total}});
  const json doc = {{"trace", epochs},
                    {"steps", steps},
                    {"lambda", ctx.cfg.student.lambda},
                    {"quality_loss", distill::to_string(ctx.cfg.student.quality)},
                    {"test_latent_gap", {{"initial", gap_before}, {"final", gap_after}}},
                    {"student_parameters", res.student.encoder.parameter_count()},
                    {"teacher_encoder_parameters", teacher.encoder.parameter_count()}};
  ctx.student = std::move(res.student);
  const std::vector<double> epoch_ms = to_ms(res.epoch_seconds);
  timing["epoch_ms"] = epoch_ms;
  timing["epoch_ms_mean"] = mean_of(epoch_ms);
  return {{"student", ctx.record(kStudentCkpt)}, {"trace", ctx.write_text(kStudentTrace, doc.dump(2) + "\n")}};
}

std::map<std::string, Artifact> generate_stage(Context& ctx, json&) {
  const PreparedData& pd = ctx.prepared();
  const generate::SyntheticDataset sd =
      generate::generate_synthetic(pd.split.train, ctx.get_student(), ctx.get_teacher(), ctx.cfg.generation);
  const fs::path sidecar = generate::export_synthetic(sd, ctx.dir / kSynthetic);
  return {{"synthetic", ctx.record(kSynthetic)}, {"provenance", ctx.record(sidecar.filename().string())}};
}

void write_latent_pca(Context& ctx, const std::string& rel, const Eigen::MatrixXd& mu, std::span<const int> s,
                      std::vector<std::string>& flags) {
  const eval::PcaResult pca = eval::pca_project(mu, 2);
  if (pca.rank_deficient) flags.push_back("pca: " + rel + " projected onto fewer than 2 axes (zero padded)");
  const auto& schema = ctx.prepared().full.schema;
  eval::write_pca_csv(ctx.dir / rel, pca, s, schema.column(schema.protected_column()).categories);
}

std::map<std::string, Artifact> evaluate_stage(Context& ctx, json& timing) {
  const PreparedData& pd = ctx.prepared();
  const data::Dataset synth =
      data::load_csv(ctx.manifest.artifact(ctx.dir, stage_name(Stage::Generate), "synthetic"), pd.full.schema);
  const data::Dataset& test = pd.split.test;

  auto t0 = Clock::now();
  eval::EvalReport report = eval::evaluate_pipeline(test, synth, ctx.cfg.eval);
  timing["synthetic_ms"] = ms_since(t0);
  timing["synthetic_breakdown_ms"] = report.timings_json();

  std::map<std::string, Artifact> arts;
  if (ctx.cfg.eval.repetitions > 0 && ctx.cfg.baseline) {
    t0 = Clock::now();
    const eval::EvalReport base = eval::evaluate_pipeline(test, pd.split.train, ctx.cfg.eval);
    timing["baseline_ms"] = ms_since(t0);
    arts["baseline"] = ctx.write_text(kBaseline, base.to_json().dump(2) + "\n");
  }

  const auto rows = static_cast<Eigen::Index>(std::min<std::size_t>(ctx.cfg.pca_rows, test.rows()));
  if (rows >= 2) {
    const Eigen::MatrixXd x = test.x.topRows(rows);
    const Eigen::MatrixXd g = test.group_onehot().topRows(rows);
    const std::span<const int> s(test.s.data(), static_cast<std::size_t>(rows));
    write_latent_pca(ctx, kPcaTeacher, ctx.get_teacher().encode(x, g).mu, s, report.flags);
    write_latent_pca(ctx, kPcaStudent, ctx.get_student().encode(x, g).mu, s, report.flags);
    arts["pca_teacher"] = ctx.record(kPcaTeacher);
    arts["pca_student"] = ctx.record(kPcaStudent);
  }
  arts["report"] = ctx.write_text(kReport, report.to_json().dump(2) + "\n");
  return arts;
}

void execute(Context& ctx, Stage stage) {
  const std::string name = stage_name(stage);
  bool later = false;
  for (Stage s : stage_order()) {
    if (s == stage) later = true;
    if (later) ctx.manifest.stages.erase(stage_name(s));
  }
  ctx.say("[" + name + "] running");
  const auto t0 = Clock::now();
  StageRecord rec;
  json timing = json::object();
  try {
    switch (stage) {
      case Stage::TrainTeacher: rec.artifacts = teacher_stage(ctx, timing); break;
      case Stage::Distill: rec.artifacts = distill_stage(ctx, timing); break;
      case Stage::Generate: rec.artifacts = generate_stage(ctx, timing); break;
      case Stage::Evaluate: rec.artifacts = evaluate_stage(ctx, timing); break;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    ctx.manifest.save(ctx.dir);
    throw Error(ErrorCode::StageFailure, "stage '" + name + "' failed: " + e.what());
  } catch (const std::exception& e) {
    ctx.manifest.save(ctx.dir);
    throw Error(ErrorCode::StageFailure, "stage '" + name + "' failed: " + e.what());
  }
  rec.wall_ms = ms_since(t0);
  timing["wall_ms"] = rec.wall_ms;
  ctx.manifest.stages[name] = std::move(rec);
  ctx.manifest.save(ctx.dir);
  ctx.merge_timings(name, std::move(timing));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f s", ctx.manifest.stages[name].wall_ms / 1000.0);
  ctx.say("[" + name + "] done in " + buf);
}

void open_run_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec || !fs::is_directory(cfg.output_dir)) {
    throw Error(ErrorCode::ConfigError, "output directory " + cfg.output_dir.string() + " is not writable");
  }
  try {
    write_file(cfg.output_dir / kConfigCopy, cfg.to_json().dump(2) + "\n");
  } catch (const Error&) {
    throw Error(ErrorCode::ConfigError, "output directory " + cfg.output_dir.string() + " is not writable");
  }
}

RunManifest fresh_manifest(const RunConfig& cfg) {
  RunManifest m;
  m.config_hash = cfg.hash();
  m.seed = cfg.seed;
  return m;
}

}  // namespace

std::string stage_name(Stage s) {
  switch (s) {
    case Stage::TrainTeacher: return "train-teacher";
    case Stage::Distill: return "distill";
    case Stage::Generate: return "generate";
    case Stage::Evaluate: return "evaluate";
  }
  return "?";
}

const std::vector<Stage>& stage_order() {
  static const std::vector<Stage> order{Stage::TrainTeacher, Stage::Distill, Stage::Generate, Stage::Evaluate};
  return order;
}

PreparedData prepare_data(const RunConfig& cfg) {
  PreparedData pd;
  pd.full = data::load_csv(cfg.dataset_path, cfg.schema);
  pd.split = data::split_80_20(pd.full, stage_seed(cfg.seed, SeedStream::Split));
  return pd;
}

RunManifest run_pipeline(const RunConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  open_run_dir(cfg);
  Context ctx{cfg, cfg.output_dir, fresh_manifest(cfg), opts.log, {}, {}, {}};
  if (opts.resume) {
    if (auto existing = RunManifest::load(cfg.output_dir)) {
      if (existing->config_hash != ctx.manifest.config_hash) {
        throw Error(ErrorCode::ManifestMismatch, "cannot resume: " + cfg.output_dir.string() +
                                                     " was produced by a different config");
      }
      ctx.manifest = *existing;
    }
  }
  bool rerun = !opts.resume;
  for (Stage s : stage_order()) {
    if (!rerun && ctx.manifest.stage_intact(ctx.dir, stage_name(s))) {
      ctx.say("[" + stage_name(s) + "] up to date, skipped");
      continue;
    }
    rerun = true;
    execute(ctx, s);
  }
  return ctx.manifest;
}

RunManifest run_stage(const RunConfig& cfg, Stage stage, const RunOptions& opts) {
  cfg.validate();
  open_run_dir(cfg);
  Context ctx{cfg, cfg.output_dir, fresh_manifest(cfg), opts.log, {}, {}, {}};
  auto existing = RunManifest::load(cfg.output_dir);
  if (existing && existing->config_hash == ctx.manifest.config_hash) {
    ctx.manifest = *existing;
  } else if (existing && stage != Stage::TrainTeacher) {
    throw Error(ErrorCode::ManifestMismatch,
                cfg.output_dir.string() + " was produced by a different config; rerun the earlier stages");
  }
  for (Stage s : stage_order()) {
    if (s == stage) break;
    if (!ctx.manifest.stage_intact(ctx.dir, stage_name(s))) {
      throw Error(ErrorCode::StageFailure, "stage '" + stage_name(stage) + "' needs '" + stage_name(s) +
                                               "' to have completed in " + cfg.output_dir.string());
    }
  }
  if (opts.resume && ctx.manifest.stage_intact(ctx.dir, stage_name(stage))) {
    ctx.say("[" + stage_name(stage) + "] up to date, skipped");
    return ctx.manifest;
  }
  execute(ctx, stage);
  return ctx.manifest;
}

// ---- sweeps ----

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Lambda: return "lambda";
    case SweepAxis::Beta: return "beta";
    case SweepAxis::LossKind: return "loss-kind";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "lambda") return SweepAxis::Lambda;
  if (name == "beta") return SweepAxis::Beta;
  if (name == "loss-kind" || name == "loss") return SweepAxis::LossKind;
  throw Error(ErrorCode::ConfigError, "unknown sweep axis '" + name + "' (lambda, beta, loss-kind)");
}

std::vector<std::string> default_sweep_values(SweepAxis a) {
  if (a == SweepAxis::LossKind) return {"l1", "mse", "huber", "mean-difference"};
  std::vector<std::string> v;
  for (int i = 1; i <= 10; ++i) v.push_back(std::to_string(i));
  return v;
}

namespace {

void apply_axis(RunConfig& c, SweepAxis axis, const std::string& value) {
  auto number = [&] {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size()) throw Error(ErrorCode::ConfigError, "sweep value '" + value + "' is not a number");
    return v;
  };
  switch (axis) {
    case SweepAxis::Lambda: c.student.lambda = number(); break;
    case SweepAxis::Beta: c.teacher.beta = number(); break;
    case SweepAxis::LossKind: c.student.quality = distill::quality_loss_from_string(value); break;
  }
  c.validate();
}

std::string cell_name(SweepAxis axis, const std::string& value) { return to_string(axis) + "-" + value; }

}  // namespace

std::vector<std::string> SweepResult::csv_header() const {
  std::vector<std::string> h{"axis", "value", "status", "teacher_hash", "train_ms"};
  for (const auto& m : eval::metric_names()) {
    h.push_back(m + "_mean");
    h.push_back(m + "_std");
  }
  return h;
}

std::string SweepResult::to_csv() const {
  data::CsvTable t;
  t.header = csv_header();
  for (const auto& c : cells) {
    data::CsvRow row{to_string(axis), c.value, c.status, c.teacher_hash, data::format_numeric(c.train_ms, false)};
    for (const auto& m : eval::metric_names()) {
      if (c.report && c.report->metrics.contains(m)) {
        row.push_back(data::format_numeric(c.report->metrics.at(m).mean, false));
        row.push_back(data::format_numeric(c.report->metrics.at(m).std, false));
      } else {
        row.push_back("n/a");
        row.push_back("n/a");
      }
    }
    t.rows.push_back(std::move(row));
  }
  std::ostringstream os;
  data::write_csv(os, t);
  return os.str();
}

json SweepResult::to_json() const {
  json rows = json::array();
  for (const auto& c : cells) {
    json metrics = json::object();
    for (const auto& m : eval::metric_names()) {
      if (c.report && c.report->metrics.contains(m)) {
        metrics[m] = {{"mean", c.report->metrics.at(m).mean}, {"std", c.report->metrics.at(m).std}};
      } else {
        metrics[m] = "n/a";
      }
    }
    rows.push_back({{"value", c.value},
                    {"status", c.status},
                    {"teacher_hash", c.teacher_hash},
                    {"train_ms", c.train_ms},
                    {"run_dir", c.run_dir.string()},
                    {"metrics", metrics}});
  }
  return {{"axis", to_string(axis)}, {"cells", rows}};
}

SweepResult run_sweep(const RunConfig& cfg, SweepAxis axis, std::vector<std::string> values, const RunOptions& opts) {
  cfg.validate();
  if (values.empty()) values = default_sweep_values(axis);
  open_run_dir(cfg);
  const fs::path root = cfg.output_dir;
  auto say = [&](const std::string& m) {
    if (opts.log) *opts.log << m << '\n' << std::flush;
  };

  std::optional<RunManifest> shared;
  fs::path shared_dir;
  if (axis != SweepAxis::Beta) {
    RunConfig tc = cfg;
    tc.output_dir = root / "teacher";
    shared_dir = tc.output_dir;
    say("[sweep] shared teacher in " + shared_dir.string());
    shared = run_stage(tc, Stage::TrainTeacher, opts);
  }

  SweepResult result;
  result.axis = axis;
  for (const auto& value : values) {
    SweepCell cell;
    cell.value = value;
    cell.run_dir = root / cell_name(axis, value);
    say("[sweep] " + cell_name(axis, value));
    try {
      RunConfig c = cfg;
      apply_axis(c, axis, value);
      c.output_dir = cell.run_dir;
      RunOptions cell_opts = opts;
      if (shared) {
        open_run_dir(c);
        auto existing = RunManifest::load(c.output_dir);
        const bool keep = opts.resume && existing && existing->config_hash == c.hash();
        RunManifest m = keep ? *existing : fresh_manifest(c);
        const std::string tname = stage_name(Stage::TrainTeacher);
        const StageRecord& rec = shared->stages.at(tname);
        if (!keep || m.stages.count(tname) == 0 || m.stages.at(tname).artifacts.at("teacher").hash !=
                                                       rec.artifacts.at("teacher").hash) {
          m.stages.clear();
        }
        for (const auto& [key, a] : rec.artifacts) {
          fs::copy_file(shared_dir / a.path, c.output_dir / a.path, fs::copy_options::overwrite_existing);
        }
        m.stages[tname] = rec;
        m.save(c.output_dir);
        cell_opts.resume = true;
      }
      const RunManifest done = run_pipeline(c, cell_opts);
      cell.teacher_hash = done.stages.at(stage_name(Stage::TrainTeacher)).artifacts.at("teacher").hash;
      cell.train_ms = done.stages.at(stage_name(Stage::TrainTeacher)).wall_ms +
                      done.stages.at(stage_name(Stage::Distill)).wall_ms;
      cell.report = eval::EvalReport::from_json(json::parse(read_file(done.artifact(c.output_dir, "evaluate", "report"))));
    } catch (const std::exception& e) {
      cell.status = e.what();
      say("[sweep] " + cell_name(axis, value) + " failed: " + cell.status);
    }
    result.cells.push_back(std::move(cell));
  }
  write_file(root / "sweep.csv", result.to_csv());
  write_file(root / "sweep.json", result.to_json().dump(2) + "\n");
  return result;
}

// ---- consolidated report ----

namespace {

std::string mean_std(const eval::EvalReport& r, const std::string& name) {
  auto it = r.metrics.find(name);
  if (it == r.metrics.end()) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f ± %.3f", it->second.mean, it->second.std);
  return buf;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f%%", 100.0 * v);
  return buf;
}

}  // namespace

ConsolidatedReport consolidate_runs(const std::vector<fs::path>& run_dirs) {
  if (run_dirs.empty()) throw Error(ErrorCode::InvalidArgument, "report needs at least one run directory");
  ConsolidatedReport out;
  std::optional<json> schema;
  for (const auto& dir : run_dirs) {
    const auto manifest = RunManifest::load(dir);
    if (!manifest) throw Error(ErrorCode::ManifestMismatch, dir.string() + " has no manifest");
    manifest->audit(dir);
    const json cfg = json::parse(read_file(dir / kConfigCopy));
    const json& s = cfg.at("dataset").at("schema");
    if (!schema) {
      schema = s;
    } else if (*schema != s) {
      throw Error(ErrorCode::ManifestMismatch, dir.string() + " uses a different schema than " + run_dirs[0].string());
    }
    ReportRow row;
    row.run = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
    std::ostringstream label;
    label << cfg.at("student").at("quality_loss").get<std::string>() << " lambda=" << cfg.at("student").at("lambda")
          << " beta=" << cfg.at("teacher").at("beta");
    row.label = label.str();
    row.report = eval::EvalReport::from_json(json::parse(read_file(manifest->artifact(dir, "evaluate", "report"))));
    row.train_ms = manifest->stages.at(stage_name(Stage::TrainTeacher)).wall_ms +
                   manifest->stages.at(stage_name(Stage::Distill)).wall_ms;
    out.rows.push_back(std::move(row));
  }
  const double ref = out.rows.front().train_ms;
  for (auto& r : out.rows) r.relative_time = ref > 0.0 ? (r.train_ms - ref) / ref : 0.0;
  return out;
}

std::string ConsolidatedReport::to_markdown() const {
  std::ostringstream os;
  os << "| run | config |";
  for (const auto& m : eval::metric_names()) os << ' ' << m << " |";
  os << " train ms | vs first |\n|---|---|";
  for (std::size_t i = 0; i < eval::metric_names().size(); ++i) os << "---|";
  os << "---|---|\n";
  for (const auto& r : rows) {
    os << "| " << r.run << " | " << r.label << " |";
    for (const auto& m : eval::metric_names()) os << ' ' << mean_std(r.report, m) << " |";
    char ms[32];
    std::snprintf(ms, sizeof ms, "%.0f", r.train_ms);
    os << ' ' << ms << " | " << percent(r.relative_time) << " |\n";
  }
  return os.str();
}

std::string ConsolidatedReport::to_csv() const {
  data::CsvTable t;
  t.header = {"run", "config"};
  for (const auto& m : eval::metric_names()) {
    t.header.push_back(m + "_mean");
    t.header.push_back(m + "_std");
  }
  t.header.push_back("train_ms");
  t.header.push_back("relative_time");
  for (const auto& r : rows) {
    data::CsvRow row{r.run, r.label};
    for (const auto& m : eval::metric_names()) {
      auto it = r.report.metrics.find(m);
      row.push_back(it == r.report.metrics.end() ? "n/a" : data::format_numeric(it->second.mean, false));
      row.push_back(it == r.report.metrics.end() ? "n/a" : data::format_numeric(it->second.std, false));
    }
    row.push_back(data::format_numeric(r.train_ms, false));
    row.push_back(data::format_numeric(r.relative_time, false));
    t.rows.push_back(std::move(row));
  }
  std::ostringstream os;
  data::write_csv(os, t);
  return os.str();
}

json ConsolidatedReport::to_json() const {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"run", r.run},
                   {"config", r.label},
                   {"report", r.report.to_json()},
                   {"train_ms", r.train_ms},
                   {"relative_time", r.relative_time}});
  }
  return {{"rows", arr}};
}

}  // namespace fairdistill::pipeline
