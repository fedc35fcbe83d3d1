// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/data/split.hpp"

#include <numeric>

#include "fairdistill/error.hpp"
#include "fairdistill/rng.hpp"

namespace fairdistill::data {

SplitPair split_80_20(const Dataset& d, std::uint64_t seed) {
  const std::size_t n = d.rows();
  if (n < 5) throw Error(ErrorCode::TooFewRows, "split needs at least 5 rows, got " + std::to_string(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle(std::span<std::size_t>(order), rng);
  const std::size_t n_train = n * 4 / 5;

  SplitPair out;
  out.seed = seed;
  out.train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  out.train = d.subset(out.train_rows);
  out.test = d.subset(out.test_rows);
  return out;
}

}  // namespace fairdistill::data
