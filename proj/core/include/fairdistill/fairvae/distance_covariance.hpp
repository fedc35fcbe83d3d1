// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "fairdistill/nn/tape.hpp"

namespace fairdistill::fairvae {

using nn::Matrix;

/// Empirical squared distance covariance (biased V-statistic) between the
/// rows of `z` (n x k) and the rows of `group_onehot` (n x |S|).
///
/// With a_ij = ||z_i - z_j|| and b_ij = ||s_i - s_j||, each matrix is
/// double-centered (A = a - row means - column means + grand mean) and
///   V^2 = (1/n^2) sum_ij A_ij B_ij.
/// Floating-point round-off can leave tiny negative values; the result is
/// clamped at 0. Throws BatchTooSmall for n < 2.
double distance_covariance_sq(const Matrix& z, const Matrix& group_onehot);

/// Differentiable with respect to z; the group encoding is constant.
///
/// Since B is double-centered, sum_ij A_ij B_ij = sum_ij a_ij B_ij, so
/// dV^2/da_ij = B_ij / n^2 and
///   dV^2/dz_i = (2/n^2) sum_j B_ij (z_i - z_j) / a_ij
/// (pairs with a_ij = 0 contribute 0, the subgradient at the kink). When
/// the clamp is active the gradient is zero.
nn::Var distance_covariance_sq(const nn::Var& z, const Matrix& group_onehot);

}  // namespace fairdistill::fairvae
