// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace fairdistill::pipeline {

inline constexpr const char* kToolVersion = "0.1.0";

struct Artifact {
  std::string path;  ///< relative to the run directory
  std::string hash;  ///< FNV-1a of the file bytes
};

struct StageRecord {
  std::map<std::string, Artifact> artifacts;
  double wall_ms = 0.0;
};

/// Record of a run directory: which config produced it, which stages
/// completed, and the files each stage wrote.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::map<std::string, StageRecord> stages;

  bool has_stage(const std::string& name) const { return stages.contains(name); }
  /// Path of a declared artifact; throws StageFailure if undeclared.
  std::filesystem::path artifact(const std::filesystem::path& run_dir, const std::string& stage,
                                 const std::string& name) const;
  /// True when the stage is recorded and all of its files exist with the
  /// recorded hashes.
  bool stage_intact(const std::filesystem::path& run_dir, const std::string& name) const;
  /// Every listed artifact exists and matches its hash; throws
  /// ManifestMismatch naming the first offender.
  void audit(const std::filesystem::path& run_dir) const;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);

  void save(const std::filesystem::path& run_dir) const;
  /// nullopt when the directory holds no manifest.
  static std::optional<RunManifest> load(const std::filesystem::path& run_dir);
};

std::string file_hash(const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);
/// Writes text atomically (temporary file, then rename). Throws IoError.
void write_file(const std::filesystem::path& path, const std::string& text);

inline constexpr const char* kManifestFile = "manifest.json";

}  // namespace fairdistill::pipeline
