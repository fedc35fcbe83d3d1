// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace fairdistill::eval {

struct DensityCoverage {
  double density = 0.0;
  double coverage = 0.0;
};

/// k-NN manifold metrics. Each real point i gets the radius to its k-th
/// nearest other real point; density counts, per synthetic point, the real
/// balls containing it (scaled by 1 / (k * M)); coverage is the fraction of
/// real balls containing at least one synthetic point. Exact pairwise
/// distances, no approximation. Throws TooFewRealPoints unless N > k.
DensityCoverage density_coverage(const Eigen::MatrixXd& real, const Eigen::MatrixXd& synth, int k_nn = 5);

}  // namespace fairdistill::eval
