// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/pipeline/config.hpp"

#include <fstream>
#include <set>

#include "fairdistill/error.hpp"
#include "fairdistill/nn/checkpoint.hpp"
#include "fairdistill/rng.hpp"

namespace fairdistill::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.contains(k)) fail("unknown key '" + k + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(where + "." + key + " has the wrong type");
  }
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return (base / p).lexically_normal();
}

void read_optimizer(const json& j, nn::AdamConfig& cfg, const std::string& where) {
  read(j, "learning_rate", cfg.learning_rate, where);
}

}  // namespace

std::uint64_t stage_seed(std::uint64_t run_seed, SeedStream stream) {
  return derive_seed(run_seed, static_cast<std::uint64_t>(stream));
}

RunConfig RunConfig::from_json(const json& j, const fs::path& base_dir) {
  allow_keys(j, "config", {"dataset", "teacher", "student", "generation", "eval", "output_dir", "seed"});
  RunConfig c;
  if (!j.contains("dataset")) fail("config needs a 'dataset' section");
  const json& ds = j.at("dataset");
  allow_keys(ds, "dataset", {"path", "schema", "protected", "target"});
  if (!ds.contains("path") || !ds.contains("schema")) fail("dataset needs 'path' and 'schema'");
  c.dataset_path = resolve(base_dir, ds.at("path").get<std::string>());
  try {
    if (ds.at("schema").is_string()) {
      c.schema_path = resolve(base_dir, ds.at("schema").get<std::string>());
      std::ifstream in(c.schema_path);
      if (!in) fail("cannot read schema " + c.schema_path.string());
      c.schema = data::TabularSchema::from_json(json::parse(in));
    } else {
      c.schema = data::TabularSchema::from_json(ds.at("schema"));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(std::string("invalid schema: ") + e.what());
  } catch (const json::exception& e) {
    fail(std::string("invalid schema JSON: ") + e.what());
  }
  auto check_role = [&](const char* key, std::size_t expected, const char* role) {
    if (!ds.contains(key)) return;
    const std::string name = ds.at(key).get<std::string>();
    const auto idx = c.schema.find(name);
    if (!idx) fail(std::string(role) + " column '" + name + "' is not in the schema");
    if (*idx != expected) fail("column '" + name + "' is not the schema's " + role + " column");
  };
  check_role("protected", c.schema.protected_column(), "protected");
  check_role("target", c.schema.target_column(), "target");

  if (j.contains("teacher")) {
    const json& t = j.at("teacher");
    allow_keys(t, "teacher", {"beta", "epochs", "batch_size", "latent_dim", "hidden", "learning_rate"});
    read(t, "beta", c.teacher.beta, "teacher");
    read(t, "epochs", c.teacher.epochs, "teacher");
    read(t, "batch_size", c.teacher.batch_size, "teacher");
    read(t, "latent_dim", c.teacher.latent_dim, "teacher");
    read(t, "hidden", c.teacher.hidden, "teacher");
    read_optimizer(t, c.teacher.optimizer, "teacher");
  }
  if (j.contains("student")) {
    const json& s = j.at("student");
    allow_keys(s, "student", {"quality_loss", "lambda", "huber_delta", "epochs", "batch_size", "hidden", "learning_rate"});
    if (s.contains("quality_loss")) {
      try {
        c.student.quality = distill::quality_loss_from_string(s.at("quality_loss").get<std::string>());
      } catch (const std::exception& e) {
        fail(e.what());
      }
    }
    read(s, "lambda", c.student.lambda, "student");
    read(s, "huber_delta", c.student.huber_delta, "student");
    read(s, "epochs", c.student.epochs, "student");
    read(s, "batch_size", c.student.batch_size, "student");
    read(s, "hidden", c.student.hidden, "student");
    read_optimizer(s, c.student.optimizer, "student");
  }
  if (j.contains("generation")) {
    const json& g = j.at("generation");
    allow_keys(g, "generation", {"n_out", "resample_groups"});
    read(g, "n_out", c.generation.n_out, "generation");
    read(g, "resample_groups", c.generation.resample_groups, "generation");
  }
  if (j.contains("eval")) {
    const json& e = j.at("eval");
    allow_keys(e, "eval", {"repetitions", "trees", "max_depth", "mtry", "k_nn", "max_points", "permutation_shuffles",
                           "baseline", "pca_rows"});
    read(e, "repetitions", c.eval.repetitions, "eval");
    read(e, "trees", c.eval.forest.n_trees, "eval");
    read(e, "max_depth", c.eval.forest.max_depth, "eval");
    read(e, "mtry", c.eval.forest.mtry, "eval");
    read(e, "k_nn", c.eval.k_nn, "eval");
    read(e, "max_points", c.eval.max_points, "eval");
    read(e, "permutation_shuffles", c.eval.permutation_shuffles, "eval");
    read(e, "baseline", c.baseline, "eval");
    read(e, "pca_rows", c.pca_rows, "eval");
  }
  std::string out = "out";
  read(j, "output_dir", out, "config");
  c.output_dir = resolve(base_dir, out);
  std::uint64_t seed = 0;
  read(j, "seed", seed, "config");
  c.set_seed(seed);
  c.validate();
  return c;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j, fs::absolute(path).parent_path());
}

json RunConfig::to_json() const {
  json j;
  j["dataset"] = {{"path", dataset_path.string()},
                  {"schema", schema.to_json()},
                  {"protected", schema.column(schema.protected_column()).name},
                  {"target", schema.column(schema.target_column()).name}};
  j["teacher"] = {{"beta", teacher.beta},
                  {"epochs", teacher.epochs},
                  {"batch_size", teacher.batch_size},
                  {"latent_dim", teacher.latent_dim},
                  {"hidden", teacher.hidden},
                  {"learning_rate", teacher.optimizer.learning_rate}};
  j["student"] = {{"quality_loss", distill::to_string(student.quality)},
                  {"lambda", student.lambda},
                  {"huber_delta", student.huber_delta},
                  {"epochs", student.epochs},
                  {"batch_size", student.batch_size},
                  {"hidden", student.hidden},
                  {"learning_rate", student.optimizer.learning_rate}};
  j["generation"] = {{"n_out", generation.n_out}, {"resample_groups", generation.resample_groups}};
  j["eval"] = {{"repetitions", eval.repetitions},
               {"trees", eval.forest.n_trees},
               {"max_depth", eval.forest.max_depth},
               {"mtry", eval.forest.mtry},
               {"k_nn", eval.k_nn},
               {"max_points", eval.max_points},
               {"permutation_shuffles", eval.permutation_shuffles},
               {"baseline", baseline},
               {"pca_rows", pca_rows}};
  j["output_dir"] = output_dir.string();
  j["seed"] = seed;
  return j;
}

std::string RunConfig::hash() const {
  json j = to_json();
  j.erase("output_dir");
  return nn::fnv1a_hex(j.dump());
}

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  teacher.seed = stage_seed(s, SeedStream::Teacher);
  student.seed = stage_seed(s, SeedStream::Distill);
  generation.seed = stage_seed(s, SeedStream::Generate);
  eval.seed = stage_seed(s, SeedStream::Eval);
}

void RunConfig::validate() const {
  try {
    schema.validate();
    teacher.validate();
    student.validate();
    eval.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  if (dataset_path.empty()) fail("dataset path is empty");
  if (output_dir.empty()) fail("output_dir is empty");
}

}  // namespace fairdistill::pipeline
