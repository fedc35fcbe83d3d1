// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace fairdistill {

/// All randomness in the library flows through this engine. The helpers below
/// avoid the standard distributions, whose output differs between standard
/// library implementations, so trajectories are reproducible across toolchains.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Counter-based derivation of an independent stream seed from a base seed.
/// Used to fan a single run seed out to stages, repetitions and rows.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng) noexcept;

/// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n) noexcept;

/// Standard normal draw (Box-Muller, one variate per call).
double standard_normal(Rng& rng) noexcept;

template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

}  // namespace fairdistill
