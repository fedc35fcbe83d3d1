// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/eval/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairdistill/error.hpp"

namespace fairdistill::eval {

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& input, double tol, int max_sweeps) {
  if (input.rows() != input.cols()) throw Error(ErrorCode::ShapeMismatch, "jacobi_eigen needs a square matrix");
  const Eigen::Index n = input.rows();
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(a.norm(), 1e-300);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (std::sqrt(off) <= tol * scale) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

PcaResult pca_project(const Eigen::MatrixXd& z, int dims) {
  if (dims < 1 || z.rows() < dims || z.cols() < dims) {
    throw Error(ErrorCode::InvalidArgument, "pca needs rows >= dims and cols >= dims");
  }
  const Eigen::MatrixXd centered = z.rowwise() - z.colwise().mean();
  const double denom = z.rows() > 1 ? static_cast<double>(z.rows() - 1) : 1.0;
  const Eigen::MatrixXd cov = centered.transpose() * centered / denom;
  const SymmetricEigen eig = jacobi_eigen(cov);

  const double total = eig.values.cwiseMax(0.0).sum();
  const double floor = 1e-12 * std::max(total, 1e-300);
  PcaResult out;
  out.axes = Eigen::MatrixXd::Zero(z.cols(), dims);
  for (int i = 0; i < dims; ++i) {
    const double lambda = std::max(eig.values(i), 0.0);
    if (lambda <= floor) {
      out.rank_deficient = true;
      out.explained_variance_ratio.push_back(0.0);
      continue;
    }
    Eigen::VectorXd axis = eig.vectors.col(i);
    Eigen::Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0.0) axis = -axis;
    out.axes.col(i) = axis;
    out.explained_variance_ratio.push_back(lambda / total);
  }
  out.projection = centered * out.axes;
  return out;
}

}  // namespace fairdistill::eval
