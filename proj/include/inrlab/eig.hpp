#ifndef INRLAB_EIG_HPP
#define INRLAB_EIG_HPP

#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "inrlab/errors.hpp"
#include "inrlab/matrix.hpp"

namespace inrlab {

// Full symmetric eigendecomposition. Eigenvalues are sorted descending and
// eigenvectors are the matching unit-norm columns of `eigenvectors`.
struct EigenDecomposition {
    std::vector<double> eigenvalues;
    Matrix eigenvectors;

    std::vector<double> eigenvector(std::size_t i) const {
        std::vector<double> v(eigenvectors.rows);
        for (std::size_t r = 0; r < eigenvectors.rows; ++r) v[r] = eigenvectors(r, i);
        return v;
    }
};

namespace detail {

// Householder reduction to symmetric tridiagonal form with accumulated
// transformations (EISPACK tred2, zero-based).
inline void tred2(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = v.rows;
    for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0, h = 0.0;
        for (std::size_t k = 0; k < i; ++k) scale += std::fabs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0.0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (std::size_t k = j + 1; k < i; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k < i; ++k) v(k, j) -= f * e[k] + g * d[k];
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        double h = d[i + 1];
        if (h != 0.0) {
            for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
            for (std::size_t j = 0; j <= i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
            }
        }
        for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

// Implicit-shift QL iteration on the tridiagonal (d, e), accumulating
// rotations into v (EISPACK tql2). Throws after the sweep budget.
inline void tql2(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = v.rows;
    const long max_iter = 50 * static_cast<long>(n);
    long iter_total = 0;

    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0, tst1 = 0.0;
    const double eps = std::ldexp(1.0, -52);
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::fabs(d[l]) + std::fabs(e[l]));
        std::size_t m = l;
        while (m < n && std::fabs(e[m]) > eps * tst1) ++m;

        if (m > l) {
            do {
                if (++iter_total > max_iter)
                    throw NumericError("sym_eig: QL iteration exceeded 50*n sweeps");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0.0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0, c2 = c, c3 = c;
                double el1 = e[l + 1], s = 0.0, s2 = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for (std::size_t k = 0; k < n; ++k) {
                        h = v(k, i + 1);
                        v(k, i + 1) = s * v(k, i) + c * h;
                        v(k, i) = c * v(k, i) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::fabs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

} // namespace detail

// Eigendecomposition of a symmetric matrix (symmetric within 1e-9 relative
// tolerance); eigenvalues come back descending.
inline EigenDecomposition sym_eig(const Matrix& a) {
    if (a.rows == 0 || a.rows != a.cols)
        throw ArgumentError("sym_eig: matrix must be square and nonempty");
    const std::size_t n = a.rows;
    const double scale = std::max(a.max_abs(), 1e-300);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::fabs(a(i, j) - a(j, i)) > 1e-9 * scale)
                throw ArgumentError("sym_eig: matrix is not symmetric within tolerance");

    EigenDecomposition out;
    out.eigenvectors = Matrix(n, n);
    Matrix& v = out.eigenvectors;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            v(i, j) = 0.5 * (a(i, j) + a(j, i));

    std::vector<double> d(n), e(n);
    detail::tred2(v, d, e);
    detail::tql2(v, d, e);

    // descending order
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&d](std::size_t x, std::size_t y) { return d[x] > d[y]; });

    out.eigenvalues.resize(n);
    Matrix sorted(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = d[perm[j]];
        for (std::size_t i = 0; i < n; ++i) sorted(i, j) = v(i, perm[j]);
    }
    out.eigenvectors = std::move(sorted);
    return out;
}

} // namespace inrlab

#endif
