#ifndef INRLAB_FFT_HPP
#define INRLAB_FFT_HPP

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "inrlab/errors.hpp"
#include "inrlab/matrix.hpp"

namespace inrlab {

// Frequency-domain view of a real sample grid. 1D spectra use rows == 1;
// 2D spectra keep the row-major layout of the input grid.
struct ComplexSpectrum {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::complex<double>> bins;

    std::size_t size() const { return bins.size(); }
    double magnitude(std::size_t i) const { return std::abs(bins[i]); }
    double power(std::size_t i) const { return std::norm(bins[i]); }

    double total_power() const {
        double s = 0.0;
        for (const auto& b : bins) s += std::norm(b);
        return s;
    }
};

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 transform, in place. sign = -1 forward, +1 inverse
// (no normalization here).
inline void fft_radix2(std::vector<std::complex<double>>& a, int sign) {
    const std::size_t n = a.size();
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                std::complex<double> u = a[i + j];
                std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

inline void dft_direct(std::vector<std::complex<double>>& a, int sign) {
    const std::size_t n = a.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> s(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) *
                         static_cast<double>(t) / static_cast<double>(n);
            s += a[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = s;
    }
    a = std::move(out);
}

inline void transform(std::vector<std::complex<double>>& a, int sign) {
    if (is_pow2(a.size()))
        fft_radix2(a, sign);
    else
        dft_direct(a, sign);
}

// Separable transform over a rows x cols grid stored row-major.
inline void transform_2d(std::vector<std::complex<double>>& a, std::size_t rows,
                         std::size_t cols, int sign) {
    std::vector<std::complex<double>> line;
    for (std::size_t r = 0; r < rows; ++r) {
        line.assign(a.begin() + r * cols, a.begin() + (r + 1) * cols);
        transform(line, sign);
        std::copy(line.begin(), line.end(), a.begin() + r * cols);
    }
    line.resize(rows);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) line[r] = a[r * cols + c];
        transform(line, sign);
        for (std::size_t r = 0; r < rows; ++r) a[r * cols + c] = line[r];
    }
}

} // namespace detail

// Unnormalized forward DFT: X[k] = sum_n x[n] exp(-2*pi*j*k*n/N).
inline ComplexSpectrum dft(const std::vector<double>& samples) {
    if (samples.empty()) throw ArgumentError("dft: empty input");
    ComplexSpectrum s;
    s.rows = 1;
    s.cols = samples.size();
    s.bins.assign(samples.begin(), samples.end());
    detail::transform(s.bins, -1);
    return s;
}

// 2D forward DFT applied separably over both axes of a row-major grid.
inline ComplexSpectrum dft(const Matrix& grid) {
    if (grid.rows == 0 || grid.cols == 0) throw ArgumentError("dft: empty grid");
    ComplexSpectrum s;
    s.rows = grid.rows;
    s.cols = grid.cols;
    s.bins.assign(grid.data.begin(), grid.data.end());
    detail::transform_2d(s.bins, s.rows, s.cols, -1);
    return s;
}

// Inverse with 1/N normalization; returns the complex grid.
inline std::vector<std::complex<double>> inverse_dft(const ComplexSpectrum& spec) {
    if (spec.bins.empty()) throw ArgumentError("inverse_dft: empty spectrum");
    std::vector<std::complex<double>> a = spec.bins;
    if (spec.rows <= 1)
        detail::transform(a, +1);
    else
        detail::transform_2d(a, spec.rows, spec.cols, +1);
    const double scale = 1.0 / static_cast<double>(a.size());
    for (auto& v : a) v *= scale;
    return a;
}

inline std::vector<double> inverse_dft_real(const ComplexSpectrum& spec) {
    auto a = inverse_dft(spec);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i].real();
    return out;
}

} // namespace inrlab

#endif
