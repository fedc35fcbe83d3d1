// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/nn/tape.hpp"

#include <cmath>

#include "fairdistill/error.hpp"

namespace fairdistill::nn {
namespace {

Tape& same_tape(const Var& a, const Var& b) {
  if (a.tape() == nullptr || a.tape() != b.tape()) {
    throw Error(ErrorCode::ShapeMismatch, "operands recorded on different tapes");
  }
  return *a.tape();
}

Tape& tape_of(const Var& a) {
  if (a.tape() == nullptr) throw Error(ErrorCode::ShapeMismatch, "variable is not on a tape");
  return *a.tape();
}

void require_shape(bool ok, const char* op) {
  if (!ok) throw Error(ErrorCode::ShapeMismatch, std::string("incompatible shapes for ") + op);
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

const Matrix& Var::value() const { return tape_->value(id_); }
const Matrix& Var::grad() const { return tape_->grad(id_); }

double Var::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw Error(ErrorCode::ShapeMismatch, "not a scalar");
  return v(0, 0);
}

void Tape::check_owned(const Var& v) const {
  if (v.tape_ != this || v.id_ >= nodes_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "variable does not belong to this tape");
  }
}

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, {}, nullptr, false});
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Parameter& p) {
  p.grad = Matrix::Zero(p.value.rows(), p.value.cols());
  nodes_.push_back(Node{p.value, {}, {}, &p, true});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, std::initializer_list<Var> parents, BackwardFn backward) {
  bool needs = false;
  for (const auto& p : parents) {
    check_owned(p);
    needs = needs || nodes_[p.id_].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), {}, needs ? std::move(backward) : BackwardFn{}, nullptr, needs});
  return Var(this, nodes_.size() - 1);
}

bool Tape::requires_grad(const Var& node) const {
  check_owned(node);
  return nodes_[node.id_].requires_grad;
}

void Tape::accumulate(const Var& node, const Matrix& contribution) {
  check_owned(node);
  Node& n = nodes_[node.id_];
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = contribution;
  } else {
    n.grad += contribution;
  }
}

void Tape::backward(const Var& loss) {
  check_owned(loss);
  if (consumed_) throw Error(ErrorCode::StaleTape, "backward already ran on this tape; re-run forward");
  const Matrix& lv = nodes_[loss.id_].value;
  if (lv.rows() != 1 || lv.cols() != 1) throw Error(ErrorCode::ShapeMismatch, "loss must be a scalar");
  if (!std::isfinite(lv(0, 0))) throw Error(ErrorCode::NonFiniteLoss, "loss is not finite");
  consumed_ = true;
  if (!nodes_[loss.id_].requires_grad) return;
  nodes_[loss.id_].grad = Matrix::Ones(1, 1);
  for (std::size_t i = loss.id_ + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.size() == 0) continue;
    if (n.parameter != nullptr) {
      if (!n.grad.allFinite()) {
        throw Error(ErrorCode::NonFiniteGradient, "non-finite gradient for parameter '" + n.parameter->name + "'");
      }
      n.parameter->grad += n.grad;
    } else if (n.backward) {
      // Copy: the callback may append to other nodes' gradients but never to
      // its own, so a reference would also be safe; the copy keeps that
      // independent of vector growth.
      const Matrix g = n.grad;
      n.backward(*this, g);
    }
  }
}

Var matmul(const Var& a, const Var& b) {
  Tape& t = same_tape(a, b);
  require_shape(a.cols() == b.rows(), "matmul");
  return t.record(a.value() * b.value(), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) tp.accumulate(a, g * b.value().transpose());
    if (tp.requires_grad(b)) tp.accumulate(b, a.value().transpose() * g);
  });
}

Var add_bias(const Var& a, const Var& bias) {
  Tape& t = same_tape(a, bias);
  require_shape(bias.rows() == 1 && bias.cols() == a.cols(), "add_bias");
  Matrix out = a.value().rowwise() + bias.value().row(0);
  return t.record(std::move(out), {a, bias}, [a, bias](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g);
    if (tp.requires_grad(bias)) tp.accumulate(bias, g.colwise().sum());
  });
}

Var add(const Var& a, const Var& b) {
  Tape& t = same_tape(a, b);
  require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "add");
  return t.record(a.value() + b.value(), {a, b}, [a, b](Tape& tp, const Matrix& g) {
    tp.accumulate(a, g);
    tp.accumulate(b, g);
  });
}

Var scale(const Var& a, double factor) {
  Tape& t = tape_of(a);
  return t.record(a.value() * factor, {a}, [a, factor](Tape& tp, const Matrix& g) { tp.accumulate(a, g * factor); });
}

Var relu(const Var& a) {
  Tape& t = tape_of(a);
  Matrix out = a.value().cwiseMax(0.0);
  return t.record(std::move(out), {a}, [a](Tape& tp, const Matrix& g) {
    tp.accumulate(a, (a.value().array() > 0.0).select(g, 0.0));
  });
}

Var sigmoid(const Var& a) {
  Tape& t = tape_of(a);
  Matrix out = a.value().unaryExpr([](double x) { return logistic(x); });
  Matrix y = out;
  return t.record(std::move(out), {a}, [a, y = std::move(y)](Tape& tp, const Matrix& g) {
    tp.accumulate(a, (g.array() * y.array() * (1.0 - y.array())).matrix());
  });
}

Var hcat(const Var& a, const Var& b) {
  Tape& t = same_tape(a, b);
  require_shape(a.rows() == b.rows(), "hcat");
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a.value(), b.value();
  const Eigen::Index ca = a.cols();
  const Eigen::Index cb = b.cols();
  return t.record(std::move(out), {a, b}, [a, b, ca, cb](Tape& tp, const Matrix& g) {
    if (tp.requires_grad(a)) tp.accumulate(a, g.leftCols(ca));
    if (tp.requires_grad(b)) tp.accumulate(b, g.rightCols(cb));
  });
}

Var slice_cols(const Var& a, Eigen::Index start, Eigen::Index count) {
  Tape& t = tape_of(a);
  require_shape(start >= 0 && count >= 0 && start + count <= a.cols(), "slice_cols");
  Matrix out = a.value().middleCols(start, count);
  return t.record(std::move(out), {a}, [a, start, count](Tape& tp, const Matrix& g) {
    Matrix full = Matrix::Zero(a.rows(), a.cols());
    full.middleCols(start, count) = g;
    tp.accumulate(a, full);
  });
}

Var sum(const Var& a) {
  Tape& t = tape_of(a);
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return t.record(std::move(out), {a}, [a](Tape& tp, const Matrix& g) {
    tp.accumulate(a, Matrix::Constant(a.rows(), a.cols(), g(0, 0)));
  });
}

Var reparameterize(const Var& mu, const Var& log_var, const Matrix& noise) {
  Tape& t = same_tape(mu, log_var);
  require_shape(mu.rows() == log_var.rows() && mu.cols() == log_var.cols() && noise.rows() == mu.rows() &&
                    noise.cols() == mu.cols(),
                "reparameterize");
  const Matrix sd_noise = ((0.5 * log_var.value().array()).exp() * noise.array()).matrix();
  Matrix z = mu.value() + sd_noise;
  return t.record(std::move(z), {mu, log_var}, [mu, log_var, sd_noise](Tape& tp, const Matrix& g) {
    tp.accumulate(mu, g);
    if (tp.requires_grad(log_var)) tp.accumulate(log_var, (0.5 * g.array() * sd_noise.array()).matrix());
  });
}

double bce_with_logits(const Matrix& logits, const Matrix& targets) {
  require_shape(logits.rows() == targets.rows() && logits.cols() == targets.cols(), "bce_with_logits");
  if (logits.rows() == 0) throw Error(ErrorCode::NonFiniteLoss, "empty batch");
  // -[t log s(x) + (1-t) log(1-s(x))] = softplus(x) - t x
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      total += softplus(logits(r, c)) - targets(r, c) * logits(r, c);
    }
  }
  return total / static_cast<double>(logits.rows());
}

Var bce_with_logits(const Var& logits, const Matrix& targets) {
  Tape& t = tape_of(logits);
  Matrix out(1, 1);
  out(0, 0) = bce_with_logits(logits.value(), targets);
  return t.record(std::move(out), {logits}, [logits, targets](Tape& tp, const Matrix& g) {
    const double n = static_cast<double>(logits.rows());
    Matrix d = logits.value().unaryExpr([](double x) { return logistic(x); }) - targets;
    tp.accumulate(logits, d * (g(0, 0) / n));
  });
}

double gaussian_kl(const Matrix& mu, const Matrix& log_var) {
  require_shape(mu.rows() == log_var.rows() && mu.cols() == log_var.cols(), "gaussian_kl");
  if (mu.rows() == 0) throw Error(ErrorCode::NonFiniteLoss, "empty batch");
  const double total = (log_var.array().exp() + mu.array().square() - 1.0 - log_var.array()).sum();
  return 0.5 * total / static_cast<double>(mu.rows());
}

Var gaussian_kl(const Var& mu, const Var& log_var) {
  Tape& t = same_tape(mu, log_var);
  Matrix out(1, 1);
  out(0, 0) = gaussian_kl(mu.value(), log_var.value());
  return t.record(std::move(out), {mu, log_var}, [mu, log_var](Tape& tp, const Matrix& g) {
    const double f = g(0, 0) / static_cast<double>(mu.rows());
    if (tp.requires_grad(mu)) tp.accumulate(mu, mu.value() * f);
    if (tp.requires_grad(log_var)) {
      tp.accumulate(log_var, (0.5 * f * (log_var.value().array().exp() - 1.0)).matrix());
    }
  });
}

}  // namespace fairdistill::nn
