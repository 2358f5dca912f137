#pragma once

#include <concepts>
#include <cstdint>
#include <random>

namespace sop {

/// Default per-run generator. One instance per run; every stochastic
/// decision of a run draws from it.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
/// Implemented by hand (not std::uniform_real_distribution) so that
/// the stream consumption is fixed across standard libraries.
template <std::uniform_random_bit_generator G>
double uniform01(G& rng) {
    static_assert(G::max() - G::min() == ~std::uint64_t{0},
                  "uniform01 expects a full 64-bit generator");
    const std::uint64_t bits = static_cast<std::uint64_t>(rng() - G::min());
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by rejection; bound must be positive.
template <std::uniform_random_bit_generator G>
std::uint64_t uniform_below(G& rng, std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
        x = static_cast<std::uint64_t>(rng() - G::min());
    } while (x >= limit);
    return x % bound;
}

}  // namespace sop
