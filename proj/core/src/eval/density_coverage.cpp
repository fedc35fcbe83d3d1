// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/eval/density_coverage.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fairdistill/error.hpp"

namespace fairdistill::eval {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double distance(const double* a, const double* b, Eigen::Index d) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double t = a[i] - b[i];
    acc += t * t;
  }
  return std::sqrt(acc);
}

}  // namespace

DensityCoverage density_coverage(const Eigen::MatrixXd& real, const Eigen::MatrixXd& synth, int k_nn) {
  if (k_nn < 1) throw Error(ErrorCode::InvalidArgument, "k_nn must be >= 1");
  if (real.rows() <= k_nn) {
    throw Error(ErrorCode::TooFewRealPoints, "need more than " + std::to_string(k_nn) + " real points");
  }
  if (real.cols() != synth.cols()) throw Error(ErrorCode::ShapeMismatch, "real and synthetic widths differ");
  const RowMajor r = real;
  const RowMajor s = synth;
  const Eigen::Index n = r.rows(), m = s.rows(), d = r.cols();

  std::vector<double> radius(static_cast<std::size_t>(n));
  std::vector<double> row(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) row[c++] = distance(r.row(i).data(), r.row(j).data(), d);
    }
    std::nth_element(row.begin(), row.begin() + (k_nn - 1), row.end());
    radius[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(k_nn - 1)];
  }

  DensityCoverage out;
  if (m == 0) return out;
  std::vector<char> covered(static_cast<std::size_t>(n), 0);
  double inside = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (distance(s.row(j).data(), r.row(i).data(), d) <= radius[static_cast<std::size_t>(i)]) {
        inside += 1.0;
        covered[static_cast<std::size_t>(i)] = 1;
      }
    }
  }
  out.density = inside / (static_cast<double>(k_nn) * static_cast<double>(m));
  out.coverage = static_cast<double>(std::count(covered.begin(), covered.end(), 1)) / static_cast<double>(n);
  return out;
}

}  // namespace fairdistill::eval
