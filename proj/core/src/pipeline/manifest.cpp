// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/pipeline/manifest.hpp"

#include <fstream>
#include <sstream>

#include "fairdistill/error.hpp"
#include "fairdistill/nn/checkpoint.hpp"

namespace fairdistill::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string file_hash(const fs::path& path) { return nn::fnv1a_hex(read_file(path)); }

fs::path RunManifest::artifact(const fs::path& run_dir, const std::string& stage, const std::string& name) const {
  auto s = stages.find(stage);
  if (s == stages.end()) throw Error(ErrorCode::StageFailure, "stage '" + stage + "' has not run in " + run_dir.string());
  auto a = s->second.artifacts.find(name);
  if (a == s->second.artifacts.end()) {
    throw Error(ErrorCode::StageFailure, "stage '" + stage + "' declared no artifact '" + name + "'");
  }
  return run_dir / a->second.path;
}

bool RunManifest::stage_intact(const fs::path& run_dir, const std::string& name) const {
  auto s = stages.find(name);
  if (s == stages.end()) return false;
  for (const auto& [key, a] : s->second.artifacts) {
    const fs::path p = run_dir / a.path;
    if (!fs::exists(p) || file_hash(p) != a.hash) return false;
  }
  return true;
}

void RunManifest::audit(const fs::path& run_dir) const {
  for (const auto& [stage, rec] : stages) {
    for (const auto& [key, a] : rec.artifacts) {
      const fs::path p = run_dir / a.path;
      if (!fs::exists(p)) throw Error(ErrorCode::ManifestMismatch, stage + "/" + key + ": missing " + p.string());
      if (file_hash(p) != a.hash) throw Error(ErrorCode::ManifestMismatch, stage + "/" + key + ": hash differs");
    }
  }
}

json RunManifest::to_json() const {
  json st = json::object();
  for (const auto& [name, rec] : stages) {
    json arts = json::object();
    for (const auto& [key, a] : rec.artifacts) arts[key] = {{"path", a.path}, {"hash", a.hash}};
    st[name] = {{"artifacts", arts}, {"wall_ms", rec.wall_ms}};
  }
  return {{"tool", "fairdistill"}, {"version", tool_version}, {"config_hash", config_hash}, {"seed", seed}, {"stages", st}};
}

RunManifest RunManifest::from_json(const json& j) {
  try {
    RunManifest m;
    m.tool_version = j.at("version").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [name, rec] : j.at("stages").items()) {
      StageRecord r;
      r.wall_ms = rec.value("wall_ms", 0.0);
      for (const auto& [key, a] : rec.at("artifacts").items()) {
        r.artifacts[key] = {a.at("path").get<std::string>(), a.at("hash").get<std::string>()};
      }
      m.stages[name] = std::move(r);
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ManifestMismatch, std::string("malformed manifest: ") + e.what());
  }
}

void RunManifest::save(const fs::path& run_dir) const { write_file(run_dir / kManifestFile, to_json().dump(2) + "\n"); }

std::optional<RunManifest> RunManifest::load(const fs::path& run_dir) {
  const fs::path p = run_dir / kManifestFile;
  if (!fs::exists(p)) return std::nullopt;
  try {
    return from_json(json::parse(read_file(p)));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ManifestMismatch, std::string("manifest is not JSON: ") + e.what());
  }
}

}  // namespace fairdistill::pipeline
