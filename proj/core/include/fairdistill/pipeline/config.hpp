// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "fairdistill/data/schema.hpp"
#include "fairdistill/distill/student.hpp"
#include "fairdistill/eval/report.hpp"
#include "fairdistill/fairvae/teacher.hpp"
#include "fairdistill/generate/generate.hpp"

namespace fairdistill::pipeline {

/// Per-stage seeds derived from the run seed: derive_seed(seed, stream).
enum class SeedStream : std::uint64_t { Split = 1, Teacher = 2, Distill = 3, Generate = 4, Eval = 5 };

std::uint64_t stage_seed(std::uint64_t run_seed, SeedStream stream);

/// Everything one pipeline run needs. Loaded from a JSON document; relative
/// paths inside it resolve against the directory holding the file. Unknown
/// keys are rejected so typos fail early.
struct RunConfig {
  std::filesystem::path dataset_path;
  std::filesystem::path schema_path;  ///< empty when the schema is inline
  data::TabularSchema schema;
  fairvae::FairVaeConfig teacher;
  distill::DistillConfig student;
  generate::GenerateOptions generation;
  eval::EvalConfig eval;
  bool baseline = true;         ///< also evaluate a forest trained on real data
  std::size_t pca_rows = 2000;  ///< test rows projected for the latent PCA CSVs
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;

  /// Throws ConfigError. `base_dir` anchors relative paths.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& path);

  /// Normalized form with every field explicit and absolute paths. Stage
  /// seeds are not stored; they follow from `seed`.
  nlohmann::json to_json() const;
  /// FNV-1a of to_json() with the output directory left out, so the same
  /// experiment written elsewhere hashes the same.
  std::string hash() const;

  /// Re-derives the stage seeds after changing `seed`.
  void set_seed(std::uint64_t s);
  /// Checks sub-configs; throws ConfigError.
  void validate() const;
};

}  // namespace fairdistill::pipeline
