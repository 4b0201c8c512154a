// random.hpp
// Deterministic randomness. All simulation randomness flows from a 64-bit seed;
// nothing here touches wall-clock or device entropy.

#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace coreqkd {

using Rng = std::mt19937_64;

// splitmix64 finalizer (Steele, Lea, Flood). Used to derive independent
// sub-seeds from a master seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Seed for trial `trial` of sweep point `point`. Pure function of its inputs,
// so serial and parallel execution see the same streams.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t point,
                                    std::uint64_t trial) noexcept {
    return splitmix64(master ^ splitmix64((point << 32) ^ splitmix64(trial)));
}

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Rejection sampling keeps it unbiased and
// independent of the standard library's distribution implementation.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % n;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

// Inverse-CDF draw over unnormalized branch weights. Branches with zero
// weight are never returned.
inline std::size_t sample_index(Rng& rng, std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double u = uniform01(rng) * total;
    double cum = 0.0;
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last_nonzero = i;
        cum += weights[i];
        if (u < cum) return i;
    }
    return last_nonzero;
}

}  // namespace coreqkd
