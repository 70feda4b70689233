// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace genlog {

using Rng = std::mt19937_64;

// The standard distributions are implementation-defined; these are not, so
// seeded runs reproduce across standard libraries.

/// Unbiased integer in [0, n). n must be > 0.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

/// Uniform double in [lo, hi).
double uniform_real(Rng& rng, double lo, double hi);

/// Derives a stream seed from a base seed and a label (FNV-1a + splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

}  // namespace genlog
