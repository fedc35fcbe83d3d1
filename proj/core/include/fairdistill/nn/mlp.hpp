// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fairdistill/nn/tape.hpp"
#include "fairdistill/rng.hpp"

namespace fairdistill::nn {

enum class Activation { Identity, Relu, Sigmoid };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

/// y = act(x W + b); W is inputs x outputs, b is 1 x outputs.
struct DenseLayer {
  Parameter weight;
  Parameter bias;
  Activation activation = Activation::Identity;

  Eigen::Index inputs() const { return weight.value.rows(); }
  Eigen::Index outputs() const { return weight.value.cols(); }
};

/// Feed-forward stack of dense layers. Rows of a batch are records.
class Mlp {
 public:
  Mlp() = default;
  /// Takes ownership of the layers; throws ShapeMismatch if widths do not
  /// chain or a bias is not 1 x outputs.
  explicit Mlp(std::vector<DenseLayer> layers);

  /// widths = {input, hidden..., output}. Hidden layers use `hidden`, the
  /// last layer `output`. He-uniform weights for ReLU layers, Glorot-uniform
  /// otherwise; zero biases.
  static Mlp create(std::span<const std::size_t> widths, Activation hidden, Activation output, Rng& rng,
                    const std::string& name = "mlp");

  Eigen::Index input_width() const;
  Eigen::Index output_width() const;
  std::size_t parameter_count() const;
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& layers() noexcept { return layers_; }
  std::vector<Parameter*> parameters();

  /// Tape-free evaluation. Throws ShapeMismatch, NonFiniteActivation.
  Matrix forward(const Matrix& batch) const;
  /// Differentiable evaluation; registers every parameter on the tape.
  Var forward(Tape& tape, const Var& batch);

 private:
  std::vector<DenseLayer> layers_;
};

inline Matrix forward(const Mlp& net, const Matrix& batch) { return net.forward(batch); }

/// Diagonal Gaussian posterior parameters, one row per record.
struct GaussianHead {
  Matrix mu;
  Matrix log_var;

  Eigen::Index latent_dim() const { return mu.cols(); }
};

/// Splits a 2k-wide encoder output into (mu, log_var).
GaussianHead split_head(const Matrix& encoder_output);

/// z = mu + exp(log_var / 2) .* noise.
Matrix reparam_sample(const GaussianHead& head, const Matrix& noise);

/// rows x cols matrix of standard normal draws, filled row-major.
Matrix standard_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace fairdistill::nn
