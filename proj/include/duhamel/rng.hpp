#pragma once

#include <cmath>
#include <cstdint>

namespace duhamel::rng {

// Counter-based Gaussian stream: draw i of stream `seed` is a pure function
// of (seed, i), so any draw can be regenerated without replaying the stream.
// Identifier and version are part of the on-disk reproducibility contract.
inline constexpr const char* kGeneratorName = "splitmix64-boxmuller";
inline constexpr int kGeneratorVersion = 1;

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Map 64 bits to (0,1); never returns 0 or 1.
inline double uniform01(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal draw `index` of stream `seed` (Box-Muller, cosine branch).
inline double gaussian(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t k1 = mix64(seed ^ mix64(2 * index));
    const std::uint64_t k2 = mix64(seed ^ mix64(2 * index + 1));
    const double u1 = uniform01(k1);
    const double u2 = uniform01(k2);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// Stable sub-stream seed for sample k of a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t k) {
    return mix64(base ^ mix64(k + 0x51ED2701ull));
}

}  // namespace duhamel::rng
