// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "fairdistill/data/dataset.hpp"
#include "fairdistill/nn/adam.hpp"
#include "fairdistill/nn/checkpoint.hpp"
#include "fairdistill/nn/mlp.hpp"

namespace fairdistill::fairvae {

using nn::Matrix;

/// Conditional VAE. Encoder: [x | onehot(s)] -> (mu, log_var), each k wide.
/// Decoder: [z | onehot(s)] -> logits over the encoded feature width.
struct TeacherModel {
  nn::Mlp encoder;
  nn::Mlp decoder;
  int latent_dim = 0;
  int groups = 0;

  int feature_width() const { return static_cast<int>(decoder.output_width()); }

  nn::GaussianHead encode(const Matrix& features, const Matrix& group_onehot) const;
  Matrix decode_logits(const Matrix& z, const Matrix& group_onehot) const;
  /// sigmoid(decode_logits): per-cell reconstruction in [0, 1].
  Matrix decode(const Matrix& z, const Matrix& group_onehot) const;

  /// Checks the width invariants; throws ShapeMismatch.
  void validate() const;

  nn::Checkpoint to_checkpoint() const;
  static TeacherModel from_checkpoint(const nn::Checkpoint& ckpt);
};

struct FairVaeConfig {
  double beta = 7.0;
  int epochs = 200;
  int batch_size = 256;
  int latent_dim = 8;
  std::vector<std::size_t> hidden = {64, 64};
  nn::AdamConfig optimizer;
  std::uint64_t seed = 0;

  /// beta >= 0, k >= 1, batch >= 2, epochs >= 1; throws InvalidConfig.
  void validate() const;
};

struct ElboTerms {
  double recon = 0.0;  ///< mean over rows of summed per-cell binary cross-entropy
  double kl = 0.0;     ///< mean over rows of KL(q(z|x,s) || N(0, I))
};

/// Both terms for a batch with explicit reparameterization noise.
ElboTerms elbo_terms(const TeacherModel& model, const Matrix& features, const Matrix& group_onehot,
                     const Matrix& noise);

struct TeacherEpoch {
  int epoch = 0;
  double recon = 0.0;
  double kl = 0.0;
  double v2 = 0.0;
  double total = 0.0;
};

struct TeacherResult {
  TeacherModel model;
  std::vector<TeacherEpoch> trace;
  std::vector<double> epoch_seconds;
};

TeacherModel make_teacher(int feature_width, int groups, const FairVaeConfig& cfg);

/// Minimizes recon + kl + beta * V^2(z, s) per mini-batch with Adam, where z
/// is the reparameterized sample. The V^2 term only enters the graph when
/// beta > 0; it is always recorded in the trace. Batches are a seeded
/// shuffle each epoch; a trailing batch of one row is dropped. Deterministic
/// for a fixed seed. Throws NonFiniteLoss naming the epoch and batch.
TeacherResult train_teacher(const data::Dataset& d, const FairVaeConfig& cfg);

/// Mean V^2 of posterior samples over consecutive batches of `batch_size`
/// rows (in dataset order). Evaluation helper for held-out data.
double mean_batch_v2(const TeacherModel& model, const data::Dataset& d, int batch_size, std::uint64_t seed);

}  // namespace fairdistill::fairvae
