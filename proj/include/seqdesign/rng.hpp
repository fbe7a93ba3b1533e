#pragma once
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace seqdesign {

// The standard fixes mt19937_64's output sequence, so traces are reproducible
// across toolchains. Distributions below avoid <random>'s implementation-defined
// transforms for the same reason.
using Rng = std::mt19937_64;
inline constexpr std::string_view rng_name = "mt19937_64";

inline Rng replicate_stream(std::uint64_t seed, std::uint64_t replicate) {
    return Rng(seed + replicate);
}

// 53 random bits mapped to [0, 1).
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    auto k = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    return k < n ? k : n - 1;
}

// Box-Muller; consumes two uniforms per draw.
inline double standard_normal(Rng& rng) {
    double u1 = 1.0 - uniform01(rng);
    double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace seqdesign
