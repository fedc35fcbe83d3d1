// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "fairdistill/nn/mlp.hpp"
#include "fairdistill/nn/tape.hpp"

namespace fairdistill::distill {

using nn::Matrix;

enum class QualityLoss { L1, MSE, Huber, MeanDifference };

std::string to_string(QualityLoss kind);
/// Accepts "l1", "mse", "huber", "mean-difference" (case-insensitive);
/// throws InvalidConfig otherwise.
QualityLoss quality_loss_from_string(const std::string& name);

/// huber_delta(r) = r^2 / 2 for |r| <= delta, delta * (|r| - delta / 2) beyond.
double huber(double residual, double delta);

/// Per-coordinate batch mean of the elementwise loss, summed over the k
/// coordinates. MeanDifference compares column means instead:
/// sum_j |mean_i z_ij - mean_i z'_ij|.
double quality_loss(const Matrix& z, const Matrix& z_prime, QualityLoss kind, double delta = 1.0);
/// Differentiable in z_prime; z (the teacher code) is a constant.
nn::Var quality_loss(const Matrix& z, const nn::Var& z_prime, QualityLoss kind, double delta = 1.0);

/// Mean over the batch of KL(student posterior || N(0, I)).
double utility_kl(const nn::GaussianHead& head);

}  // namespace fairdistill::distill
