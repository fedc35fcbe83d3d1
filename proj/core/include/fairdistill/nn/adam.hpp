// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "fairdistill/nn/tape.hpp"

namespace fairdistill::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  long long step = 0;
};

/// One bias-corrected Adam update of every parameter from its `grad`.
/// Moments are allocated on the first call. Throws ShapeMismatch when the
/// state does not match the parameters, InvalidArgument for lr <= 0.
void adam_step(std::span<Parameter* const> params, AdamState& state, const AdamConfig& config);

}  // namespace fairdistill::nn
