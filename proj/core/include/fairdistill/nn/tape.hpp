// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fairdistill::nn {

using Matrix = Eigen::MatrixXd;

/// A trainable tensor and its gradient accumulator.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

class Tape;

/// Handle to a node recorded on a Tape. Cheap to copy; valid while the tape
/// lives.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  /// Gradient after Tape::backward; zero-sized if the node got none.
  const Matrix& grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double scalar() const;

  Tape* tape() const noexcept { return tape_; }
  std::size_t id() const noexcept { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Records a forward computation over matrices and replays it in reverse.
/// Nodes are appended in evaluation order, which is already topological, so
/// the backward pass is a single reverse sweep. A tape supports exactly one
/// backward pass.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape& tape, const Matrix& grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  /// Leaf bound to a parameter. Zeroes p.grad; backward accumulates into it.
  Var parameter(Parameter& p);
  /// Appends an op result. `backward` receives this node's gradient and must
  /// call accumulate() for each parent that requires a gradient.
  Var record(Matrix value, std::initializer_list<Var> parents, BackwardFn backward);

  /// Seeds d(loss)/d(loss) = 1 and propagates. loss must be a finite 1x1
  /// node of this tape. Throws StaleTape on a second call, NonFiniteGradient
  /// if any parameter gradient is non-finite.
  void backward(const Var& loss);

  void accumulate(const Var& node, const Matrix& contribution);
  bool requires_grad(const Var& node) const;
  bool consumed() const noexcept { return consumed_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  const Matrix& grad(std::size_t id) const { return nodes_[id].grad; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    BackwardFn backward;
    Parameter* parameter = nullptr;
    bool requires_grad = false;
  };

  void check_owned(const Var& v) const;

  std::vector<Node> nodes_;
  bool consumed_ = false;
};

// Differentiable ops. All operands must live on the same tape.

Var matmul(const Var& a, const Var& b);
/// a + broadcast(bias) where bias is 1 x cols(a).
Var add_bias(const Var& a, const Var& bias);
Var add(const Var& a, const Var& b);
Var scale(const Var& a, double factor);
Var relu(const Var& a);
Var sigmoid(const Var& a);
/// Column concatenation [a | b].
Var hcat(const Var& a, const Var& b);
Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count);
Var sum(const Var& a);

/// z = mu + exp(log_var / 2) .* noise, with noise held constant.
Var reparameterize(const Var& mu, const Var& log_var, const Matrix& noise);

/// Mean over rows of the per-row summed binary cross-entropy between
/// sigmoid(logits) and targets in [0, 1]. Evaluated in the stable
/// log-sum-exp form.
Var bce_with_logits(const Var& logits, const Matrix& targets);
double bce_with_logits(const Matrix& logits, const Matrix& targets);

/// Mean over rows of KL(N(mu, diag(exp(log_var))) || N(0, I))
///   = 1/2 sum_j (exp(log_var_j) + mu_j^2 - 1 - log_var_j).
Var gaussian_kl(const Var& mu, const Var& log_var);
double gaussian_kl(const Matrix& mu, const Matrix& log_var);

}  // namespace fairdistill::nn
