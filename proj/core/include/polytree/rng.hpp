#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace polytree {

// mt19937_64's output sequence is fixed by the standard; the transforms below
// are written out so draws are identical on every standard library.
using Rng = std::mt19937_64;

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of an independent substream identified by a path of keys, e.g.
// derive_seed(seed, {kErrors, replicate, node}).
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t state = splitmix64(seed);
    for (const auto key : keys) state = splitmix64(state ^ splitmix64(key + 0x632be59bd9b4e019ULL));
    return state;
}

namespace stream {
inline constexpr std::uint64_t kTree = 1;
inline constexpr std::uint64_t kOrientation = 2;
inline constexpr std::uint64_t kCoefficients = 3;
inline constexpr std::uint64_t kErrorParameters = 4;
inline constexpr std::uint64_t kErrors = 5;
inline constexpr std::uint64_t kGaussianNodes = 6;
} // namespace stream

// Uniform on [0, 1) with 53 random bits.
[[nodiscard]] inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

[[nodiscard]] inline double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Uniform integer in [0, bound) by rejection.
[[nodiscard]] inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
    const std::uint64_t limit = bound * (Rng::max() / bound);
    std::uint64_t x = 0;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

[[nodiscard]] inline bool coin(Rng& rng) { return (rng() >> 63) != 0; }

// Marsaglia polar method; one of the pair is discarded to keep draws stateless.
[[nodiscard]] inline double standard_normal(Rng& rng) {
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform01(rng) - 1.0;
        v = 2.0 * uniform01(rng) - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return u * std::sqrt(-2.0 * std::log(s) / s);
}

// Gamma(shape, scale) by Marsaglia-Tsang; shape < 1 via the U^(1/shape) boost.
[[nodiscard]] inline double gamma_variate(Rng& rng, double shape, double scale) {
    if (shape < 1.0) {
        const double boost = std::pow(1.0 - uniform01(rng), 1.0 / shape);
        return gamma_variate(rng, shape + 1.0, scale) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = standard_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = 1.0 - uniform01(rng);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

} // namespace polytree
