#ifndef INRLAB_RNG_HPP
#define INRLAB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "inrlab/errors.hpp"

namespace inrlab {

// Counter-based generator: draw i of stream `seed` is a pure function of
// (seed, i), so sequences replay identically across runs and platforms.
// Normal variates use Box-Muller on paired uniforms (two counter ticks per
// draw, cosine branch).
struct SeededRng {
    std::uint64_t seed = 0;
    std::uint64_t counter = 0;

    SeededRng() = default;
    explicit SeededRng(std::uint64_t s) : seed(s) {}

    std::uint64_t next_u64() {
        // splitmix64 over the advancing counter, offset by the stream seed
        std::uint64_t z = seed + (++counter) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1], safe as a log argument
    double next_unit_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double a, double b) {
        if (!(a <= b)) throw ArgumentError("uniform: requires a <= b");
        return a + (b - a) * next_unit();
    }

    double normal(double mean, double std) {
        if (!(std >= 0.0)) throw ArgumentError("normal: requires std >= 0");
        double u1 = next_unit_open();
        double u2 = next_unit();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        return mean + std * z;
    }

    // uniform index in [0, n)
    std::size_t index(std::size_t n) {
        if (n == 0) throw ArgumentError("index: empty range");
        return static_cast<std::size_t>(next_u64() % n);
    }

    // Derives an independent stream; used to hand one seed to many tasks.
    SeededRng fork(std::uint64_t stream) const {
        SeededRng t(seed ^ (0x9E3779B97F4A7C15ull * (stream + 1)));
        return t;
    }
};

inline std::vector<double> draw_uniform(SeededRng& rng, double a, double b, std::size_t n) {
    if (!(a <= b)) throw ArgumentError("draw_uniform: requires a <= b");
    std::vector<double> out(n);
    for (auto& v : out) v = rng.uniform(a, b);
    return out;
}

inline std::vector<double> draw_normal(SeededRng& rng, double mean, double std, std::size_t n) {
    if (!(std >= 0.0)) throw ArgumentError("draw_normal: requires std >= 0");
    std::vector<double> out(n);
    for (auto& v : out) v = rng.normal(mean, std);
    return out;
}

} // namespace inrlab

#endif
