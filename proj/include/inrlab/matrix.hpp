#ifndef INRLAB_MATRIX_HPP
#define INRLAB_MATRIX_HPP

#include <cmath>
#include <cstdlib>
#include <cstddef>
#include <string>
#include <thread>
#include <vector>

#include "inrlab/errors.hpp"

namespace inrlab {

// Dense row-major matrix of doubles. The only matrix type in the library;
// everything heavier (eigendecomposition, Gram assembly) builds on it.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data; // row-major, rows*cols entries

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data) m = std::max(m, std::fabs(v));
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : data) s += v * v;
        return std::sqrt(s);
    }

    Matrix transposed() const {
        Matrix t(cols, rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }
};

namespace detail {

inline unsigned worker_count() {
    static const unsigned n = [] {
        if (const char* env = std::getenv("INRLAB_THREADS")) {
            long v = std::atol(env);
            if (v >= 1 && v <= 64) return static_cast<unsigned>(v);
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1u : std::min(hw, 8u);
    }();
    return n;
}

} // namespace detail

// Runs fn(begin, end) over a contiguous partition of [0, n). Workers own
// disjoint index ranges, so results are bitwise independent of the worker
// count as long as fn writes only to its own range.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t grain = 4096) {
    unsigned workers = detail::worker_count();
    if (workers <= 1 || n <= grain) {
        fn(std::size_t{0}, n);
        return;
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, (n + grain - 1) / grain));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t b = std::min(n, w * chunk);
        std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& t : pool) t.join();
}

// Fixed-order dot product. Eight independent accumulator chains keep the
// reduction order deterministic while still vectorizing.
template <class T>
T dot_strided(const T* a, const T* b, std::size_t n) {
    T acc[8] = {T(0), T(0), T(0), T(0), T(0), T(0), T(0), T(0)};
    std::size_t t = 0;
    for (; t + 8 <= n; t += 8)
        for (int u = 0; u < 8; ++u) acc[u] = acc[u] + a[t + u] * b[t + u];
    T s = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
    for (; t < n; ++t) s = s + a[t] * b[t];
    return s;
}

// C (n x m) = A (n x k) * B^T with B stored (m x k) row-major.
template <class T>
void matmul_nt(const T* A, std::size_t n, std::size_t k, const T* B, std::size_t m, T* C) {
    parallel_for(n, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            const T* a = A + i * k;
            T* c = C + i * m;
            for (std::size_t j = 0; j < m; ++j)
                c[j] = dot_strided(a, B + j * k, k);
        }
    }, 16384 / (k + 1) + 1);
}

// C (n x m) = A (n x k) * B (k x m), both row-major.
template <class T>
void matmul_nn(const T* A, std::size_t n, std::size_t k, const T* B, std::size_t m, T* C) {
    parallel_for(n, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            T* c = C + i * m;
            for (std::size_t j = 0; j < m; ++j) c[j] = T(0);
            const T* a = A + i * k;
            for (std::size_t l = 0; l < k; ++l) {
                const T ail = a[l];
                const T* b = B + l * m;
                for (std::size_t j = 0; j < m; ++j) c[j] = c[j] + ail * b[j];
            }
        }
    }, 16384 / (k + 1) + 1);
}

// C (k x m) += A^T * B where A is (n x k) and B is (n x m); accumulation
// runs over n in fixed ascending order (single-threaded on purpose: the
// outputs overlap across n).
template <class T>
void matmul_tn_accumulate(const T* A, std::size_t n, std::size_t k, const T* B, std::size_t m, T* C) {
    for (std::size_t l = 0; l < n; ++l) {
        const T* a = A + l * k;
        const T* b = B + l * m;
        for (std::size_t j = 0; j < k; ++j) {
            const T alj = a[j];
            T* c = C + j * m;
            for (std::size_t t = 0; t < m; ++t) c[t] = c[t] + alj * b[t];
        }
    }
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ArgumentError(msg);
}

} // namespace inrlab

#endif
