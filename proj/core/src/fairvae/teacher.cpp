// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/fairvae/teacher.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "fairdistill/error.hpp"
#include "fairdistill/fairvae/distance_covariance.hpp"
#include "fairdistill/rng.hpp"

namespace fairdistill::fairvae {
namespace {

Matrix hstack(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

struct Batch {
  Matrix features;
  Matrix groups;
};

Batch gather(const data::Dataset& d, const Matrix& onehot, std::span<const std::size_t> rows) {
  Batch b;
  b.features.resize(static_cast<Eigen::Index>(rows.size()), d.x.cols());
  b.groups.resize(static_cast<Eigen::Index>(rows.size()), onehot.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    b.features.row(static_cast<Eigen::Index>(i)) = d.x.row(static_cast<Eigen::Index>(rows[i]));
    b.groups.row(static_cast<Eigen::Index>(i)) = onehot.row(static_cast<Eigen::Index>(rows[i]));
  }
  return b;
}

}  // namespace

nn::GaussianHead TeacherModel::encode(const Matrix& features, const Matrix& group_onehot) const {
  return nn::split_head(encoder.forward(hstack(features, group_onehot)));
}

Matrix TeacherModel::decode_logits(const Matrix& z, const Matrix& group_onehot) const {
  if (z.cols() != latent_dim) {
    throw Error(ErrorCode::LatentDimMismatch, "latent width " + std::to_string(z.cols()) + " != " +
                                                  std::to_string(latent_dim));
  }
  return decoder.forward(hstack(z, group_onehot));
}

Matrix TeacherModel::decode(const Matrix& z, const Matrix& group_onehot) const {
  return decode_logits(z, group_onehot).unaryExpr([](double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
}

void TeacherModel::validate() const {
  if (latent_dim < 1 || groups < 1) throw Error(ErrorCode::ShapeMismatch, "teacher latent_dim and groups must be >= 1");
  if (encoder.output_width() != 2 * latent_dim) throw Error(ErrorCode::ShapeMismatch, "encoder output is not 2k wide");
  if (decoder.input_width() != latent_dim + groups) {
    throw Error(ErrorCode::ShapeMismatch, "decoder input width is not k + |S|");
  }
  if (encoder.input_width() != decoder.output_width() + groups) {
    throw Error(ErrorCode::ShapeMismatch, "encoder input width is not |x| + |S|");
  }
}

nn::Checkpoint TeacherModel::to_checkpoint() const {
  nn::Checkpoint c;
  c.latent_dim = latent_dim;
  c.networks.emplace("encoder", encoder);
  c.networks.emplace("decoder", decoder);
  c.meta = {{"role", "teacher"}, {"groups", groups}};
  return c;
}

TeacherModel TeacherModel::from_checkpoint(const nn::Checkpoint& ckpt) {
  if (!ckpt.networks.contains("encoder") || !ckpt.networks.contains("decoder")) {
    throw Error(ErrorCode::CheckpointFormat, "teacher checkpoint needs encoder and decoder networks");
  }
  TeacherModel m;
  m.encoder = ckpt.networks.at("encoder");
  m.decoder = ckpt.networks.at("decoder");
  m.latent_dim = ckpt.latent_dim;
  m.groups = ckpt.meta.value("groups", 0);
  m.validate();
  return m;
}

void FairVaeConfig::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
  if (!(beta >= 0.0) || !std::isfinite(beta)) bad("beta must be >= 0");
  if (latent_dim < 1) bad("latent_dim must be >= 1");
  if (batch_size < 2) bad("batch_size must be >= 2 (distance covariance needs pairs)");
  if (epochs < 1) bad("epochs must be >= 1");
  for (auto h : hidden) {
    if (h == 0) bad("hidden widths must be positive");
  }
}

ElboTerms elbo_terms(const TeacherModel& model, const Matrix& features, const Matrix& group_onehot,
                     const Matrix& noise) {
  if (features.rows() == 0) throw Error(ErrorCode::NonFiniteLoss, "empty batch");
  const nn::GaussianHead head = model.encode(features, group_onehot);
  const Matrix z = nn::reparam_sample(head, noise);
  ElboTerms t;
  t.recon = nn::bce_with_logits(model.decode_logits(z, group_onehot), features);
  t.kl = nn::gaussian_kl(head.mu, head.log_var);
  if (!std::isfinite(t.recon) || !std::isfinite(t.kl)) throw Error(ErrorCode::NonFiniteLoss, "ELBO term not finite");
  return t;
}

TeacherModel make_teacher(int feature_width, int groups, const FairVaeConfig& cfg) {
  cfg.validate();
  Rng init(derive_seed(cfg.seed, 1));
  std::vector<std::size_t> enc{static_cast<std::size_t>(feature_width + groups)};
  enc.insert(enc.end(), cfg.hidden.begin(), cfg.hidden.end());
  enc.push_back(static_cast<std::size_t>(2 * cfg.latent_dim));
  std::vector<std::size_t> dec{static_cast<std::size_t>(cfg.latent_dim + groups)};
  dec.insert(dec.end(), cfg.hidden.rbegin(), cfg.hidden.rend());
  dec.push_back(static_cast<std::size_t>(feature_width));

  TeacherModel m;
  m.encoder = nn::Mlp::create(enc, nn::Activation::Relu, nn::Activation::Identity, init, "encoder");
  m.decoder = nn::Mlp::create(dec, nn::Activation::Relu, nn::Activation::Identity, init, "decoder");
  m.latent_dim = cfg.latent_dim;
  m.groups = groups;
  m.validate();
  return m;
}

TeacherResult train_teacher(const data::Dataset& d, const FairVaeConfig& cfg) {
  cfg.validate();
  if (d.rows() < 2) throw Error(ErrorCode::BatchTooSmall, "training needs at least 2 rows");
  const int groups = static_cast<int>(d.schema.group_count());
  TeacherResult result;
  result.model = make_teacher(static_cast<int>(d.x.cols()), groups, cfg);
  TeacherModel& model = result.model;

  std::vector<nn::Parameter*> params = model.encoder.parameters();
  for (auto* p : model.decoder.parameters()) params.push_back(p);
  nn::AdamState adam;
  Rng rng(derive_seed(cfg.seed, 2));
  const Matrix onehot = d.group_onehot();
  const Eigen::Index k = cfg.latent_dim;

  std::vector<std::size_t> order(d.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    shuffle(std::span<std::size_t>(order), rng);
    TeacherEpoch acc;
    acc.epoch = epoch;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t len = std::min(batch, order.size() - start);
      if (len < 2) continue;
      const Batch b = gather(d, onehot, std::span<const std::size_t>(order).subspan(start, len));
      const Matrix noise = nn::standard_normal_matrix(static_cast<Eigen::Index>(len), k, rng);

      nn::Tape tape;
      const nn::Var input = tape.constant(hstack(b.features, b.groups));
      const nn::Var head = model.encoder.forward(tape, input);
      const nn::Var mu = nn::slice_cols(head, 0, k);
      const nn::Var log_var = nn::slice_cols(head, k, k);
      const nn::Var z = nn::reparameterize(mu, log_var, noise);
      const nn::Var logits = model.decoder.forward(tape, nn::hcat(z, tape.constant(b.groups)));
      const nn::Var recon = nn::bce_with_logits(logits, b.features);
      const nn::Var kl = nn::gaussian_kl(mu, log_var);
      nn::Var total = nn::add(recon, kl);
      double v2 = 0.0;
      if (cfg.beta > 0.0) {
        const nn::Var v2_var = distance_covariance_sq(z, b.groups);
        v2 = v2_var.scalar();
        total = nn::add(total, nn::scale(v2_var, cfg.beta));
      } else {
        v2 = distance_covariance_sq(z.value(), b.groups);
      }
      const double loss = total.scalar();
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::NonFiniteLoss, "teacher loss not finite at epoch " + std::to_string(epoch) +
                                                  " batch " + std::to_string(batches));
      }
      tape.backward(total);
      nn::adam_step(params, adam, cfg.optimizer);

      acc.recon += recon.scalar();
      acc.kl += kl.scalar();
      acc.v2 += v2;
      acc.total += loss;
      ++batches;
    }
    if (batches > 0) {
      const double n = static_cast<double>(batches);
      acc.recon /= n;
      acc.kl /= n;
      acc.v2 /= n;
      acc.total /= n;
    }
    result.trace.push_back(acc);
    result.epoch_seconds.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());
  }
  return result;
}

double mean_batch_v2(const TeacherModel& model, const data::Dataset& d, int batch_size, std::uint64_t seed) {
  if (batch_size < 2) throw Error(ErrorCode::BatchTooSmall, "batch_size must be >= 2");
  Rng rng(seed);
  const Matrix onehot = d.group_onehot();
  double total = 0.0;
  int batches = 0;
  const auto n = static_cast<Eigen::Index>(d.rows());
  for (Eigen::Index start = 0; start + 1 < n; start += batch_size) {
    const Eigen::Index len = std::min<Eigen::Index>(batch_size, n - start);
    if (len < 2) break;
    const Matrix x = d.x.middleRows(start, len);
    const Matrix s = onehot.middleRows(start, len);
    const nn::GaussianHead head = model.encode(x, s);
    const Matrix z = nn::reparam_sample(head, nn::standard_normal_matrix(len, model.latent_dim, rng));
    total += distance_covariance_sq(z, s);
    ++batches;
  }
  return batches ? total / batches : 0.0;
}

}  // namespace fairdistill::fairvae
