// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "fairdistill/data/dataset.hpp"

namespace fairdistill::data {

struct SplitPair {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
  /// Source row indices, in the order the rows appear in train/test.
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

/// Seeded shuffle, then the first floor(0.8 n) rows train and the rest test.
/// Requires n >= 5 (TooFewRows).
SplitPair split_80_20(const Dataset& d, std::uint64_t seed);

}  // namespace fairdistill::data
