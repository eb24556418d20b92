#ifndef INRLAB_DATAGEN_HPP
#define INRLAB_DATAGEN_HPP

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "inrlab/dataset.hpp"
#include "inrlab/errors.hpp"
#include "inrlab/fft.hpp"
#include "inrlab/matrix.hpp"
#include "inrlab/meta.hpp"
#include "inrlab/rng.hpp"

namespace inrlab {

namespace detail {

// White noise shaped by a fixed low-pass spectral envelope; the envelope is
// shared by every caller, only the phases vary with the stream.
inline Matrix band_limited_noise(std::size_t size, SeededRng& rng, double corner_bins,
                                 double power) {
    Matrix noise(size, size);
    for (auto& v : noise.data) v = rng.normal(0.0, 1.0);
    auto spec = dft(noise);
    for (std::size_t u = 0; u < size; ++u)
        for (std::size_t v = 0; v < size; ++v) {
            double ku = u <= size / 2 ? double(u) : double(u) - double(size);
            double kv = v <= size / 2 ? double(v) : double(v) - double(size);
            double rad = std::sqrt(ku * ku + kv * kv);
            double gain = 1.0 / (1.0 + std::pow(rad / corner_bins, power));
            spec.bins[u * size + v] *= gain;
        }
    auto back = inverse_dft_real(spec);
    noise.data = std::move(back);
    return noise;
}

inline void min_max_normalize(std::vector<double>& v) {
    double lo = v[0], hi = v[0];
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (hi - lo <= 0.0) {
        for (auto& x : v) x = 0.5;
        return;
    }
    for (auto& x : v) x = (x - lo) / (hi - lo);
}

} // namespace detail

// Deterministic composite test image: checkerboard + radial gradient +
// off-center disc + band-limited texture. Broad spectral content by
// construction, values in [0,1].
inline Dataset gen_test_image(std::size_t size, std::uint64_t seed, double train_fraction = 1.0,
                              std::uint64_t mask_seed = 1) {
    if (size != 16 && size != 32 && size != 64 && size != 128)
        throw ArgumentError("gen_test_image: size must be one of {16, 32, 64, 128}");
    SeededRng rng(seed);

    const std::size_t period = std::max<std::size_t>(2, size / 8);
    const double cx = rng.uniform(-0.4, 0.4), cy = rng.uniform(-0.4, 0.4);
    const double radius = rng.uniform(0.25, 0.45);
    Matrix texture = detail::band_limited_noise(size, rng, double(size) / 8.0, 2.0);
    detail::min_max_normalize(texture.data);

    std::vector<double> img(size * size);
    for (std::size_t i = 0; i < size; ++i)
        for (std::size_t j = 0; j < size; ++j) {
            const double x = -1.0 + 2.0 * double(j) / double(size);
            const double y = -1.0 + 2.0 * double(i) / double(size);
            const double checker = double(((i / period) + (j / period)) % 2);
            const double radial = 1.0 - std::sqrt(x * x + y * y) / std::numbers::sqrt2;
            const double disc =
                (x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius ? 1.0 : 0.0;
            img[i * size + j] = 0.22 * checker + 0.30 * radial + 0.25 * disc +
                                0.23 * texture(i, j);
        }
    detail::min_max_normalize(img);
    return make_image_dataset(size, size, std::move(img), train_fraction, mask_seed,
                              "test-image:" + std::to_string(size) + ":" + std::to_string(seed));
}

// g(r) = sin(2*pi*f*i/fs), i = 0..n-1, coordinates i/fs.
inline Dataset gen_signal(double f, double fs, std::size_t n) {
    if (!(fs > 0.0)) throw ArgumentError("gen_signal: fs must be positive");
    Dataset d;
    d.dim = 1;
    d.coords = signal_coords(n, fs);
    d.targets.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        d.targets[i] = std::sin(2.0 * std::numbers::pi * f * d.coords[i]);
    d.train_mask.assign(n, 1);
    d.metadata = "signal:f=" + format_double(f) + ":fs=" + format_double(fs);
    return d;
}

// Face-proxy meta-distribution: each task is a normalized sum of 3-6 random
// anisotropic Gaussian bumps plus band-limited noise with a shared spectral
// envelope. All tasks share one train/test mask.
inline TaskSet gen_face_proxy_tasks(std::size_t grid, std::size_t count, std::uint64_t seed,
                                    double train_fraction = 0.5, std::uint64_t mask_seed = 1) {
    if (grid < 4) throw ArgumentError("gen_face_proxy_tasks: grid too small");
    if (count == 0) throw ArgumentError("gen_face_proxy_tasks: count must be >= 1");

    TaskSet set;
    set.generator = "face-proxy:grid=" + std::to_string(grid) + ":seed=" + std::to_string(seed);
    auto mask = make_split_mask(grid * grid, train_fraction, mask_seed);
    SeededRng base(seed);

    for (std::size_t t = 0; t < count; ++t) {
        SeededRng rng = base.fork(t);
        const std::size_t bumps = 3 + rng.index(4);
        struct Bump {
            double cx, cy, s1, s2, angle, amp;
        };
        std::vector<Bump> blob(bumps);
        for (auto& b : blob) {
            b.cx = rng.uniform(-0.7, 0.7);
            b.cy = rng.uniform(-0.7, 0.7);
            b.s1 = rng.uniform(0.12, 0.45);
            b.s2 = rng.uniform(0.12, 0.45);
            b.angle = rng.uniform(0.0, std::numbers::pi);
            b.amp = rng.uniform(0.4, 1.0);
        }
        Matrix noise = detail::band_limited_noise(grid, rng, double(grid) / 8.0, 2.0);

        std::vector<double> img(grid * grid, 0.0);
        for (std::size_t i = 0; i < grid; ++i)
            for (std::size_t j = 0; j < grid; ++j) {
                const double x = -1.0 + 2.0 * double(j) / double(grid);
                const double y = -1.0 + 2.0 * double(i) / double(grid);
                double v = 0.0;
                for (const auto& b : blob) {
                    const double dx = x - b.cx, dy = y - b.cy;
                    const double ca = std::cos(b.angle), sa = std::sin(b.angle);
                    const double u1 = (ca * dx + sa * dy) / b.s1;
                    const double u2 = (-sa * dx + ca * dy) / b.s2;
                    v += b.amp * std::exp(-0.5 * (u1 * u1 + u2 * u2));
                }
                img[i * grid + j] = v + 0.15 * noise(i, j);
            }
        detail::min_max_normalize(img);

        Dataset d;
        d.dim = 2;
        d.grid_rows = grid;
        d.grid_cols = grid;
        d.coords = image_grid_coords(grid, grid);
        d.targets = std::move(img);
        d.train_mask = mask;
        d.metadata = set.generator + ":task=" + std::to_string(t);
        set.tasks.push_back(std::move(d));
    }
    return set;
}

} // namespace inrlab

#endif
