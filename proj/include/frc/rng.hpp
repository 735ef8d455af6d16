#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace frc {

/// splitmix64 step; used to derive well-separated substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic substream for (seed, index); adjacent indices give independent streams.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = a ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
    std::uint64_t b = splitmix64(s);
    std::uint64_t c = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    return std::mt19937_64(seq);
}

/// Uniform double in [0, 1); uses the top 53 bits so results do not depend on the
/// standard library's distribution implementation.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// One standard normal via Box-Muller; draws exactly two uniforms.
inline double normal(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    // guard u1 = 0: log(0) would be -inf
    while (u1 <= 0.0) u1 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Pair of independent standard normals (one Box-Muller transform).
inline void normal_pair(std::mt19937_64& rng, double& n1, double& n2) {
    double u1 = uniform01(rng);
    double u2 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    double r = std::sqrt(-2.0 * std::log(u1));
    n1 = r * std::cos(2.0 * std::numbers::pi * u2);
    n2 = r * std::sin(2.0 * std::numbers::pi * u2);
}

/// Gamma(shape) variate, Marsaglia-Tsang with the alpha<1 boost; shape > 0.
inline double gamma_variate(std::mt19937_64& rng, double shape) {
    if (shape < 1.0) {
        double u = uniform01(rng);
        while (u <= 0.0) u = uniform01(rng);
        return gamma_variate(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal(rng);
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform01(rng);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

/// k distinct indices from {0, ..., n-1}, ascending; partial Fisher-Yates then sort.
std::vector<std::uint32_t> sample_without_replacement(std::mt19937_64& rng, std::uint32_t n,
                                                      std::uint32_t k);

/// In-place Fisher-Yates shuffle (stdlib std::shuffle is implementation-defined).
template <typename T>
void shuffle(std::mt19937_64& rng, std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
        if (j >= i) j = i - 1;
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace frc
