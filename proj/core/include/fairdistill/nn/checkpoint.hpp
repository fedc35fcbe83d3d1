// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "fairdistill/nn/mlp.hpp"

namespace fairdistill::nn {

/// Named networks plus the pipeline latent dimension.
///
/// On-disk layout (JSON, version 1):
///
///   {
///     "format": "fairdistill-checkpoint",
///     "version": 1,
///     "latent_dim": k,
///     "meta": { ... free-form ... },
///     "networks": {
///       "<name>": { "layers": [
///         { "inputs": i, "outputs": o, "activation": "relu|identity|sigmoid",
///           "weight": [i*o numbers, row-major over (input, output)],
///           "bias": [o numbers] }, ... ] }, ...
///     }
///   }
///
/// Numbers are written with round-trip precision, so save/load is exact and
/// the serialized text (and its hash) is stable for identical parameters.
struct Checkpoint {
  int latent_dim = 0;
  std::map<std::string, Mlp> networks;
  nlohmann::json meta = nlohmann::json::object();
};

nlohmann::json to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// FNV-1a 64 over bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);
/// Hash of the canonical serialization of the networks and latent_dim
/// (meta excluded).
std::string parameter_hash(const Checkpoint& ckpt);
std::string parameter_hash(const Mlp& net);

}  // namespace fairdistill::nn
