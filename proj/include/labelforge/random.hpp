#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace labelforge {

/// Seeded generator whose output sequence is fixed by the standard, unlike
/// the std distributions layered on top of it.
using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a label, so that
/// e.g. each sampling group gets its own reproducible stream.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

/// Uniform integer in [0, bound) by rejection sampling. bound must be > 0.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

/// Uniform double in [0, 1) with 53 bits of precision.
double uniform_unit(Rng& rng);

/// Picks k distinct indices from [0, n) without replacement; the result is
/// sorted ascending. Requires k <= n.
std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n, std::size_t k);

}  // namespace labelforge
