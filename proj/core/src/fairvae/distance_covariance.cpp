// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/fairvae/distance_covariance.hpp"

#include <cmath>

#include "fairdistill/error.hpp"

namespace fairdistill::fairvae {
namespace {

Matrix pairwise_distances(const Matrix& x) {
  const Eigen::Index n = x.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = (x.row(i) - x.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

Matrix double_center(const Matrix& d) {
  const Eigen::VectorXd row_mean = d.rowwise().mean();
  const Eigen::RowVectorXd col_mean = d.colwise().mean();
  const double grand = d.mean();
  Matrix c = d;
  c.colwise() -= row_mean;
  c.rowwise() -= col_mean;
  c.array() += grand;
  return c;
}

void check_inputs(const Matrix& z, const Matrix& s) {
  if (z.rows() < 2) throw Error(ErrorCode::BatchTooSmall, "distance covariance needs at least 2 rows");
  if (s.rows() != z.rows()) throw Error(ErrorCode::ShapeMismatch, "latent and group batches differ in length");
}

struct Terms {
  Matrix a;  // raw latent distances
  Matrix centered_b;
  double value;
};

Terms evaluate(const Matrix& z, const Matrix& s) {
  check_inputs(z, s);
  Terms t;
  t.a = pairwise_distances(z);
  t.centered_b = double_center(pairwise_distances(s));
  const Matrix centered_a = double_center(t.a);
  const double n = static_cast<double>(z.rows());
  t.value = (centered_a.array() * t.centered_b.array()).sum() / (n * n);
  return t;
}

}  // namespace

double distance_covariance_sq(const Matrix& z, const Matrix& group_onehot) {
  return std::max(0.0, evaluate(z, group_onehot).value);
}

nn::Var distance_covariance_sq(const nn::Var& z, const Matrix& group_onehot) {
  if (z.tape() == nullptr) throw Error(ErrorCode::ShapeMismatch, "variable is not on a tape");
  Terms t = evaluate(z.value(), group_onehot);
  Matrix out(1, 1);
  out(0, 0) = std::max(0.0, t.value);
  const bool clamped = t.value < 0.0;
  return z.tape()->record(std::move(out), {z}, [z, t = std::move(t), clamped](nn::Tape& tp, const Matrix& g) {
    if (clamped) return;
    const Matrix& zv = z.value();
    const Eigen::Index n = zv.rows();
    const double factor = 2.0 * g(0, 0) / (static_cast<double>(n) * static_cast<double>(n));
    // w_ij = B_ij / a_ij; grad_i = factor * (sum_j w_ij z_i - sum_j w_ij z_j)
    Matrix w = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j && t.a(i, j) > 0.0) w(i, j) = t.centered_b(i, j) / t.a(i, j);
      }
    }
    const Eigen::VectorXd row_sum = w.rowwise().sum();
    Matrix grad = (row_sum.asDiagonal() * zv - w * zv) * factor;
    tp.accumulate(z, grad);
  });
}

}  // namespace fairdistill::fairvae
