// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/nn/mlp.hpp"

#include <cmath>

#include "fairdistill/error.hpp"

namespace fairdistill::nn {
namespace {

Matrix apply(Activation a, Matrix m) {
  switch (a) {
    case Activation::Identity: return m;
    case Activation::Relu: return m.cwiseMax(0.0);
    case Activation::Sigmoid:
      return m.unaryExpr([](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      });
  }
  return m;
}

Var apply(Activation a, const Var& v) {
  switch (a) {
    case Activation::Identity: return v;
    case Activation::Relu: return relu(v);
    case Activation::Sigmoid: return sigmoid(v);
  }
  return v;
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "identity";
}

Activation activation_from_string(const std::string& name) {
  if (name == "identity") return Activation::Identity;
  if (name == "relu") return Activation::Relu;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw Error(ErrorCode::CheckpointFormat, "unknown activation '" + name + "'");
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw Error(ErrorCode::ShapeMismatch, "network has no layers");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.bias.value.rows() != 1 || l.bias.value.cols() != l.outputs()) {
      throw Error(ErrorCode::ShapeMismatch, "layer " + std::to_string(i) + " bias is not 1 x outputs");
    }
    if (i > 0 && layers_[i - 1].outputs() != l.inputs()) {
      throw Error(ErrorCode::ShapeMismatch, "layer " + std::to_string(i) + " input width " +
                                                std::to_string(l.inputs()) + " does not chain with " +
                                                std::to_string(layers_[i - 1].outputs()));
    }
    if (!l.weight.value.allFinite() || !l.bias.value.allFinite()) {
      throw Error(ErrorCode::NonFiniteActivation, "layer " + std::to_string(i) + " has non-finite parameters");
    }
  }
}

Mlp Mlp::create(std::span<const std::size_t> widths, Activation hidden, Activation output, Rng& rng,
                const std::string& name) {
  if (widths.size() < 2) throw Error(ErrorCode::ShapeMismatch, "need at least input and output widths");
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const auto in = static_cast<Eigen::Index>(widths[i]);
    const auto out = static_cast<Eigen::Index>(widths[i + 1]);
    if (in <= 0 || out <= 0) throw Error(ErrorCode::ShapeMismatch, "layer widths must be positive");
    const Activation act = i + 2 == widths.size() ? output : hidden;
    const double limit = act == Activation::Relu ? std::sqrt(6.0 / static_cast<double>(in))
                                                 : std::sqrt(6.0 / static_cast<double>(in + out));
    DenseLayer layer;
    layer.activation = act;
    layer.weight.name = name + ".l" + std::to_string(i) + ".weight";
    layer.bias.name = name + ".l" + std::to_string(i) + ".bias";
    layer.weight.value.resize(in, out);
    for (Eigen::Index r = 0; r < in; ++r) {
      for (Eigen::Index c = 0; c < out; ++c) layer.weight.value(r, c) = (2.0 * uniform01(rng) - 1.0) * limit;
    }
    layer.bias.value = Matrix::Zero(1, out);
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

Eigen::Index Mlp::input_width() const { return layers_.empty() ? 0 : layers_.front().inputs(); }
Eigen::Index Mlp::output_width() const { return layers_.empty() ? 0 : layers_.back().outputs(); }

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.value.size() + l.bias.value.size());
  return n;
}

std::vector<Parameter*> Mlp::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers_) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

Matrix Mlp::forward(const Matrix& batch) const {
  if (batch.cols() != input_width()) {
    throw Error(ErrorCode::ShapeMismatch, "batch width " + std::to_string(batch.cols()) +
                                              " != network input width " + std::to_string(input_width()));
  }
  Matrix h = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    Matrix pre = h * l.weight.value;
    pre.rowwise() += l.bias.value.row(0);
    h = apply(l.activation, std::move(pre));
    if (!h.allFinite()) {
      throw Error(ErrorCode::NonFiniteActivation, "non-finite activation after layer " + std::to_string(i));
    }
  }
  return h;
}

Var Mlp::forward(Tape& tape, const Var& batch) {
  if (batch.cols() != input_width()) {
    throw Error(ErrorCode::ShapeMismatch, "batch width " + std::to_string(batch.cols()) +
                                              " != network input width " + std::to_string(input_width()));
  }
  Var h = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    auto& l = layers_[i];
    const Var w = tape.parameter(l.weight);
    const Var b = tape.parameter(l.bias);
    h = apply(l.activation, add_bias(matmul(h, w), b));
    if (!h.value().allFinite()) {
      throw Error(ErrorCode::NonFiniteActivation, "non-finite activation after layer " + std::to_string(i));
    }
  }
  return h;
}

GaussianHead split_head(const Matrix& encoder_output) {
  if (encoder_output.cols() % 2 != 0 || encoder_output.cols() == 0) {
    throw Error(ErrorCode::ShapeMismatch, "encoder output width must be 2k");
  }
  const Eigen::Index k = encoder_output.cols() / 2;
  return GaussianHead{encoder_output.leftCols(k), encoder_output.rightCols(k)};
}

Matrix reparam_sample(const GaussianHead& head, const Matrix& noise) {
  if (noise.rows() != head.mu.rows() || noise.cols() != head.mu.cols() || head.log_var.rows() != head.mu.rows() ||
      head.log_var.cols() != head.mu.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "noise shape does not match the Gaussian head");
  }
  return head.mu + ((0.5 * head.log_var.array()).exp() * noise.array()).matrix();
}

Matrix standard_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = standard_normal(rng);
  }
  return m;
}

}  // namespace fairdistill::nn
