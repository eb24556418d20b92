#ifndef INRLAB_DATASET_HPP
#define INRLAB_DATASET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "inrlab/errors.hpp"
#include "inrlab/rng.hpp"

namespace inrlab {

// Sampled signal: coordinates, targets and a train/test pixel split.
// Image datasets keep their grid shape so spectra and exports can reshape.
struct Dataset {
    std::size_t dim = 1;
    std::vector<double> coords;        // n x dim, flattened row-major
    std::vector<double> targets;       // n
    std::vector<std::uint8_t> train_mask; // n, nonzero = training point
    std::string metadata;
    std::size_t grid_rows = 0;         // 0 when the data is not a 2D grid
    std::size_t grid_cols = 0;

    std::size_t size() const { return targets.size(); }

    std::size_t train_count() const {
        std::size_t c = 0;
        for (auto m : train_mask) c += (m != 0);
        return c;
    }

    void validate() const {
        if (dim == 0 || coords.size() != targets.size() * dim ||
            train_mask.size() != targets.size())
            throw ArgumentError("dataset: coords/targets/mask lengths are inconsistent");
        if (train_count() == 0) throw ArgumentError("dataset: needs at least one training point");
        for (double t : targets)
            if (!std::isfinite(t)) throw ArgumentError("dataset: targets must be finite");
    }
};

// Pixel-center grid on [-1, 1)^2, row-major (x fastest); the exclusive right
// endpoint keeps integer-frequency sinusoids exactly on DFT bins.
inline std::vector<double> image_grid_coords(std::size_t rows, std::size_t cols) {
    std::vector<double> c;
    c.reserve(rows * cols * 2);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            c.push_back(-1.0 + 2.0 * double(j) / double(cols));
            c.push_back(-1.0 + 2.0 * double(i) / double(rows));
        }
    return c;
}

// 1D sampling grid i/fs, i = 0..n-1.
inline std::vector<double> signal_coords(std::size_t n, double fs) {
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = double(i) / fs;
    return c;
}

// Selects floor(n*fraction) training points by seeded uniform sampling
// without replacement; the same seed reproduces the same mask, and reusing
// one mask across a batch of images matches the evaluation protocol.
inline std::vector<std::uint8_t> make_split_mask(std::size_t n, double fraction,
                                                 std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ArgumentError("make_split_mask: fraction must be in (0, 1]");
    std::vector<std::uint8_t> mask(n, 0);
    std::size_t want = static_cast<std::size_t>(fraction * double(n));
    if (want == 0) want = 1;
    if (want >= n) {
        std::fill(mask.begin(), mask.end(), 1);
        return mask;
    }
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    SeededRng rng(seed);
    for (std::size_t i = 0; i < want; ++i) {
        std::size_t j = i + rng.index(n - i);
        std::swap(idx[i], idx[j]);
        mask[idx[i]] = 1;
    }
    return mask;
}

inline Dataset make_image_dataset(std::size_t rows, std::size_t cols,
                                  std::vector<double> values, double train_fraction,
                                  std::uint64_t mask_seed, std::string metadata) {
    Dataset d;
    d.dim = 2;
    d.grid_rows = rows;
    d.grid_cols = cols;
    d.coords = image_grid_coords(rows, cols);
    d.targets = std::move(values);
    d.train_mask = make_split_mask(d.targets.size(), train_fraction, mask_seed);
    d.metadata = std::move(metadata);
    d.validate();
    return d;
}

} // namespace inrlab

#endif
