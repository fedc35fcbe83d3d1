// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/nn/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fairdistill/error.hpp"

namespace fairdistill::nn {
namespace {

constexpr const char* kFormat = "fairdistill-checkpoint";
constexpr int kVersion = 1;

nlohmann::json network_json(const Mlp& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : net.layers()) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(l.weight.value.size()));
    for (Eigen::Index r = 0; r < l.inputs(); ++r) {
      for (Eigen::Index c = 0; c < l.outputs(); ++c) w.push_back(l.weight.value(r, c));
    }
    std::vector<double> b(l.bias.value.data(), l.bias.value.data() + l.bias.value.size());
    layers.push_back({{"inputs", l.inputs()},
                      {"outputs", l.outputs()},
                      {"activation", to_string(l.activation)},
                      {"weight", std::move(w)},
                      {"bias", std::move(b)}});
  }
  return nlohmann::json{{"layers", std::move(layers)}};
}

Mlp network_from_json(const nlohmann::json& j, const std::string& name) {
  std::vector<DenseLayer> layers;
  std::size_t idx = 0;
  for (const auto& lj : j.at("layers")) {
    const auto in = lj.at("inputs").get<Eigen::Index>();
    const auto out = lj.at("outputs").get<Eigen::Index>();
    const auto w = lj.at("weight").get<std::vector<double>>();
    const auto b = lj.at("bias").get<std::vector<double>>();
    if (in <= 0 || out <= 0 || static_cast<Eigen::Index>(w.size()) != in * out ||
        static_cast<Eigen::Index>(b.size()) != out) {
      throw Error(ErrorCode::CheckpointFormat, "layer " + std::to_string(idx) + " of '" + name + "' has bad shape");
    }
    DenseLayer l;
    l.activation = activation_from_string(lj.at("activation").get<std::string>());
    l.weight.name = name + ".l" + std::to_string(idx) + ".weight";
    l.bias.name = name + ".l" + std::to_string(idx) + ".bias";
    l.weight.value.resize(in, out);
    for (Eigen::Index r = 0; r < in; ++r) {
      for (Eigen::Index c = 0; c < out; ++c) l.weight.value(r, c) = w[static_cast<std::size_t>(r * out + c)];
    }
    l.bias.value = Eigen::Map<const Matrix>(b.data(), 1, out);
    layers.push_back(std::move(l));
    ++idx;
  }
  return Mlp(std::move(layers));
}

}  // namespace

nlohmann::json to_json(const Checkpoint& ckpt) {
  nlohmann::json nets = nlohmann::json::object();
  for (const auto& [name, net] : ckpt.networks) nets[name] = network_json(net);
  return nlohmann::json{{"format", kFormat},
                        {"version", kVersion},
                        {"latent_dim", ckpt.latent_dim},
                        {"meta", ckpt.meta},
                        {"networks", std::move(nets)}};
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kFormat) throw Error(ErrorCode::CheckpointFormat, "not a checkpoint");
    if (j.at("version").get<int>() != kVersion) {
      throw Error(ErrorCode::CheckpointFormat, "unsupported checkpoint version " + j.at("version").dump());
    }
    Checkpoint ckpt;
    ckpt.latent_dim = j.at("latent_dim").get<int>();
    ckpt.meta = j.value("meta", nlohmann::json::object());
    for (const auto& [name, nj] : j.at("networks").items()) ckpt.networks.emplace(name, network_from_json(nj, name));
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CheckpointFormat, e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << to_json(ckpt).dump() << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CheckpointFormat, path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string parameter_hash(const Checkpoint& ckpt) {
  nlohmann::json nets = nlohmann::json::object();
  for (const auto& [name, net] : ckpt.networks) nets[name] = network_json(net);
  return fnv1a_hex(nlohmann::json{{"latent_dim", ckpt.latent_dim}, {"networks", std::move(nets)}}.dump());
}

std::string parameter_hash(const Mlp& net) { return fnv1a_hex(network_json(net).dump()); }

}  // namespace fairdistill::nn
