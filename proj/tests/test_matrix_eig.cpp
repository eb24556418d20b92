#include <doctest.h>

#include <cmath>
#include <vector>

#include "inrlab/eig.hpp"
#include "inrlab/matrix.hpp"
#include "inrlab/rng.hpp"

using namespace inrlab;

namespace {

// Gram-Schmidt orthonormalization of a random square matrix; used to build
// A = Q diag(lambda) Q^T with a known spectrum.
Matrix random_orthogonal(std::size_t n, SeededRng& rng) {
    Matrix q(n, n);
    for (auto& v : q.data) v = rng.normal(0.0, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t p = 0; p < j; ++p) {
            double proj = 0.0;
            for (std::size_t i = 0; i < n; ++i) proj += q(i, j) * q(i, p);
            for (std::size_t i = 0; i < n; ++i) q(i, j) -= proj * q(i, p);
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm += q(i, j) * q(i, j);
        norm = std::sqrt(norm);
        REQUIRE(norm > 1e-8);
        for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
    }
    return q;
}

Matrix spectral_compose(const Matrix& q, const std::vector<double>& lambda) {
    const std::size_t n = q.rows;
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += q(i, k) * lambda[k] * q(j, k);
            a(i, j) = s;
        }
    // exact symmetry for the decomposition input
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a(j, i) = a(i, j);
    return a;
}

} // namespace

TEST_CASE("sym_eig: identity matrix") {
    auto eig = sym_eig(Matrix::identity(3));
    for (double l : eig.eigenvalues) CHECK(l == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sym_eig: 2x2 hand case [[2,1],[1,2]]") {
    Matrix a(2, 2);
    a(0, 0) = 2; a(0, 1) = 1; a(1, 0) = 1; a(1, 1) = 2;
    auto eig = sym_eig(a);
    CHECK(eig.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(eig.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));

    const double s = 1.0 / std::sqrt(2.0);
    auto v0 = eig.eigenvector(0);
    auto v1 = eig.eigenvector(1);
    CHECK(std::fabs(v0[0] * s + v0[1] * s) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::fabs(v1[0] * s - v1[1] * s) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("sym_eig: construct-then-decompose 50x50 recovers the spectrum") {
    SeededRng rng(7);
    const std::size_t n = 50;
    std::vector<double> lambda(n);
    for (std::size_t i = 0; i < n; ++i) lambda[i] = 10.0 - 0.2 * static_cast<double>(i);
    Matrix q = random_orthogonal(n, rng);
    Matrix a = spectral_compose(q, lambda);

    auto eig = sym_eig(a);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(eig.eigenvalues[i] == doctest::Approx(lambda[i]).epsilon(1e-9));
}

TEST_CASE("sym_eig: trace identity, orthonormality, reconstruction residual") {
    SeededRng rng(21);
    const std::size_t n = 40;
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double v = rng.normal(0.0, 1.0);
            a(i, j) = v;
            a(j, i) = v;
        }
    auto eig = sym_eig(a);

    double trace = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        trace += a(i, i);
        sum += eig.eigenvalues[i];
    }
    CHECK(std::fabs(trace - sum) <= 1e-9 * std::max(1.0, std::fabs(trace)));

    const Matrix& v = eig.eigenvectors;
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p; q < n; ++q) {
            double d = 0.0;
            for (std::size_t i = 0; i < n; ++i) d += v(i, p) * v(i, q);
            CHECK(std::fabs(d - (p == q ? 1.0 : 0.0)) <= 1e-10);
        }

    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double av = 0.0;
            for (std::size_t k = 0; k < n; ++k) av += a(i, k) * v(k, j);
            double vl = v(i, j) * eig.eigenvalues[j];
            resid += (av - vl) * (av - vl);
        }
    CHECK(std::sqrt(resid) <= 1e-8 * a.frobenius_norm());
}

TEST_CASE("sym_eig: rejects non-square and asymmetric input") {
    CHECK_THROWS_AS(sym_eig(Matrix(2, 3)), ArgumentError);
    Matrix a(2, 2);
    a(0, 0) = 1; a(0, 1) = 1; a(1, 0) = 0; a(1, 1) = 1;
    CHECK_THROWS_AS(sym_eig(a), ArgumentError);
}

TEST_CASE("matmul kernels agree with index-triple reference") {
    SeededRng rng(3);
    const std::size_t n = 17, k = 23, m = 9;
    std::vector<double> A(n * k), B(m * k), Bn(k * m), C(n * m), Cr(n * m);
    for (auto& v : A) v = rng.normal(0.0, 1.0);
    for (auto& v : B) v = rng.normal(0.0, 1.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < m; ++j) Bn[i * m + j] = B[j * k + i];

    matmul_nt(A.data(), n, k, B.data(), m, C.data());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < k; ++t) s += A[i * k + t] * B[j * k + t];
            Cr[i * m + j] = s;
        }
    for (std::size_t i = 0; i < n * m; ++i) CHECK(C[i] == doctest::Approx(Cr[i]).epsilon(1e-12));

    matmul_nn(A.data(), n, k, Bn.data(), m, C.data());
    for (std::size_t i = 0; i < n * m; ++i) CHECK(C[i] == doctest::Approx(Cr[i]).epsilon(1e-12));
}
