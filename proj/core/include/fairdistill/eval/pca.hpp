// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Dense>

namespace fairdistill::eval {

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues descending; eigenvectors are the matching columns.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, double tol = 1e-14, int max_sweeps = 100);

struct PcaResult {
  Eigen::MatrixXd projection;  ///< rows x dims, centered data times the axes
  Eigen::MatrixXd axes;        ///< k x dims, unit columns
  std::vector<double> explained_variance_ratio;
  /// Axes beyond the data's rank are zero and flagged here.
  bool rank_deficient = false;
};

/// Projects mean-centered rows onto the top `dims` covariance eigenvectors.
/// Each axis is signed so its largest-magnitude entry is positive.
/// Throws InvalidArgument unless rows >= dims and cols >= dims.
PcaResult pca_project(const Eigen::MatrixXd& z, int dims = 2);

}  // namespace fairdistill::eval
