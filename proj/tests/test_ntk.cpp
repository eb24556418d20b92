#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "inrlab/ntk.hpp"
#include "inrlab/rng.hpp"

using namespace inrlab;

namespace {

std::vector<double> fd_grad(InrModel m, const std::vector<double>& coord, double h) {
    std::vector<double> g(m.param_count());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double save = m.theta[i];
        m.theta[i] = save + h;
        double up = forward(m, coord)[0];
        m.theta[i] = save - h;
        double dn = forward(m, coord)[0];
        m.theta[i] = save;
        g[i] = (up - dn) / (2.0 * h);
    }
    return g;
}

GramMatrix gram_from_matrix(Matrix m, std::size_t rows = 0, std::size_t cols = 0) {
    GramMatrix g;
    g.grid_rows = rows;
    g.grid_cols = cols;
    g.dim = 2;
    g.coords.assign(m.rows * 2, 0.0);
    g.matrix = std::move(m);
    return g;
}

} // namespace

TEST_CASE("gram_matrix: linear model kernel is the feature inner product plus one") {
    Matrix omega(2, 1);
    omega(0, 0) = 1.5;
    omega(1, 0) = 4.0;
    SeededRng rng(1);
    auto m = build_model(MappingSpec::explicit_map(omega, {0.2, 0.9}), {}, rng);

    std::vector<double> coords = {0.1, 0.35, 0.6, 0.85};
    auto g = gram_matrix(m, coords);
    auto gamma = [&](double r, int t) {
        return std::sin(omega(t, 0) * r + (t == 0 ? 0.2 : 0.9));
    };
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            double expect = gamma(coords[i], 0) * gamma(coords[j], 0) +
                            gamma(coords[i], 1) * gamma(coords[j], 1) + 1.0;
            CHECK(g.matrix(i, j) == doctest::Approx(expect).epsilon(1e-12));
        }
}

TEST_CASE("gram_matrix: diagonal equals the squared gradient norm") {
    SeededRng rng(2);
    auto m = build_model(MappingSpec::siren_first(10.0, 8, 2), {LayerSpec::sine(10.0, 8)}, rng);
    auto coords = image_grid_coords(3, 3);
    auto g = gram_matrix(m, coords);
    for (std::size_t i = 0; i < 9; ++i) {
        std::vector<double> coord = {coords[2 * i], coords[2 * i + 1]};
        auto grad = param_gradient(m, coord);
        double norm2 = 0.0;
        for (double v : grad) norm2 += v * v;
        CHECK(std::fabs(g.matrix(i, i) - norm2) <= 1e-12 * std::max(1.0, norm2));
    }
}

TEST_CASE("gram_matrix: matches the finite-difference oracle on an 8x8 grid") {
    SeededRng rng(3);
    auto m = build_model(MappingSpec::siren_first(5.0, 6, 2), {LayerSpec::sine(5.0, 6)}, rng);
    auto coords = image_grid_coords(8, 8);
    auto g = gram_matrix(m, coords);

    std::vector<std::vector<double>> grads;
    for (std::size_t i = 0; i < 64; ++i)
        grads.push_back(fd_grad(m, {coords[2 * i], coords[2 * i + 1]}, 1e-5));
    for (std::size_t i = 0; i < 64; i += 7)
        for (std::size_t j = i; j < 64; j += 9) {
            double expect = 0.0;
            for (std::size_t k = 0; k < grads[i].size(); ++k)
                expect += grads[i][k] * grads[j][k];
            CHECK(g.matrix(i, j) == doctest::Approx(expect).epsilon(1e-5));
        }
}

TEST_CASE("gram_matrix: symmetry, PSD and Cauchy-Schwarz invariants") {
    SeededRng rng(4);
    auto m = build_model(MappingSpec::fourier_random(3.0, 8, 2), {LayerSpec::relu(16)}, rng);
    auto coords = image_grid_coords(6, 6);
    auto g = gram_matrix(m, coords);

    const std::size_t n = g.matrix.rows;
    const double scale = g.matrix.max_abs();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(g.matrix(i, j) == g.matrix(j, i)); // exact, mirrored
            CHECK(g.matrix(i, j) * g.matrix(i, j) <=
                  g.matrix(i, i) * g.matrix(j, j) + 1e-10 * scale * scale);
        }

    auto spec = ntk_eigs(g);
    CHECK(spec.eig.eigenvalues.back() >= -1e-8 * spec.eig.eigenvalues.front());
}

TEST_CASE("gram_matrix: bitwise identical across batch sizes") {
    SeededRng rng(5);
    auto m = build_model(MappingSpec::siren_first(7.0, 6, 2), {LayerSpec::sine(7.0, 6)}, rng);
    auto coords = image_grid_coords(5, 5);
    auto a = gram_matrix(m, coords, 1);
    auto b = gram_matrix(m, coords, 64);
    for (std::size_t i = 0; i < a.matrix.data.size(); ++i)
        CHECK(a.matrix.data[i] == b.matrix.data[i]);
}

TEST_CASE("gram_matrix: memory budget raises a resource error") {
    SeededRng rng(6);
    auto m = build_model(MappingSpec::siren_first(7.0, 6, 2), {LayerSpec::sine(7.0, 6)}, rng);
    auto coords = image_grid_coords(8, 8);
    CHECK_THROWS_AS(gram_matrix(m, coords, 64, 1000), ResourceError);
}

TEST_CASE("ntk_eigs: rank-1, identity, and constructed spectra") {
    SeededRng rng(7);
    const std::size_t n = 12;
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal(0.0, 1.0);
    Matrix rank1(n, n);
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rank1(i, j) = v[i] * v[j];

    auto s = ntk_eigs(gram_from_matrix(std::move(rank1)));
    CHECK(s.eig.eigenvalues[0] == doctest::Approx(norm2).epsilon(1e-10));
    for (std::size_t i = 1; i < n; ++i)
        CHECK(std::fabs(s.eig.eigenvalues[i]) <= 1e-10 * s.eig.eigenvalues[0]);

    auto ident = ntk_eigs(gram_from_matrix(Matrix::identity(6)));
    for (double l : ident.eig.eigenvalues) CHECK(l == doctest::Approx(1.0).epsilon(1e-12));

    // sign convention: the largest-magnitude component is positive
    for (std::size_t col = 0; col < 6; ++col) {
        double best = 0.0, at = 0.0;
        for (std::size_t r = 0; r < 6; ++r) {
            double a = std::fabs(ident.eig.eigenvectors(r, col));
            if (a > best) {
                best = a;
                at = ident.eig.eigenvectors(r, col);
            }
        }
        CHECK(at > 0.0);
    }
}

TEST_CASE("signal_coefficients: orthonormality, zero signal, completeness") {
    SeededRng rng(8);
    auto m = build_model(MappingSpec::siren_first(6.0, 8, 2), {LayerSpec::sine(6.0, 8)}, rng);
    auto coords = image_grid_coords(4, 4);
    auto spec = ntk_eigs(gram_matrix(m, coords));

    auto phi0 = spec.eig.eigenvector(0);
    auto c = signal_coefficients(spec, phi0);
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-10));
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(std::fabs(c[i]) <= 1e-10);

    std::vector<double> zeros(spec.size(), 0.0);
    for (double v : signal_coefficients(spec, zeros)) CHECK(v == 0.0);

    std::vector<double> g(spec.size());
    for (auto& v : g) v = rng.uniform(-1.0, 1.0);
    double norm2 = 0.0;
    for (double v : g) norm2 += v * v;
    double sum2 = 0.0;
    for (double v : signal_coefficients(spec, g)) sum2 += v * v;
    CHECK(std::fabs(sum2 - norm2) <= 1e-10 * std::max(1.0, norm2));

    CHECK_THROWS_AS(signal_coefficients(spec, {1.0, 2.0}), ArgumentError);
}

TEST_CASE("energy_concentration: boundary thresholds and the double-sum oracle") {
    SeededRng rng(9);
    auto m = build_model(MappingSpec::siren_first(6.0, 8, 2), {LayerSpec::sine(6.0, 8)}, rng);
    auto coords = image_grid_coords(4, 4);
    auto spec = ntk_eigs(gram_matrix(m, coords));
    const std::size_t n = spec.size();

    // a threshold below lambda_min/lambda_0 recovers every coefficient
    double all_in = std::max(spec.eig.eigenvalues[n - 1] / spec.eig.eigenvalues[0] * 0.5,
                             1e-300);
    std::vector<std::vector<double>> signals;
    for (int s = 0; s < 3; ++s) {
        std::vector<double> g(n);
        for (auto& v : g) v = rng.normal(0.0, 1.0);
        signals.push_back(std::move(g));
    }
    auto profile = energy_concentration(spec, signals, {all_in});
    CHECK(std::fabs(profile.values[0] - 1.0) <= 1e-10);

    auto only_top = energy_concentration(spec, {spec.eig.eigenvector(0)}, {1.0, 0.5, all_in});
    for (double e : only_top.values) CHECK(e == doctest::Approx(1.0).epsilon(1e-10));

    // direct double-sum oracle at threshold 0.5
    auto prof = energy_concentration(spec, signals, {0.5});
    double oracle = 0.0;
    for (const auto& g : signals) {
        double norm2 = 0.0;
        for (double v : g) norm2 += v * v;
        for (std::size_t i = 0; i < n; ++i) {
            if (spec.eig.eigenvalues[i] / spec.eig.eigenvalues[0] < 0.5) continue;
            double dot = 0.0;
            for (std::size_t r = 0; r < n; ++r) dot += spec.eig.eigenvectors(r, i) * g[r];
            oracle += dot * dot / norm2;
        }
    }
    oracle /= double(signals.size());
    CHECK(std::fabs(prof.values[0] - oracle) <= 1e-12);

    // monotone: smaller thresholds include more energy
    auto monotone = energy_concentration(spec, signals, {1.0, 0.1, 0.01, all_in});
    for (std::size_t i = 1; i < monotone.values.size(); ++i)
        CHECK(monotone.values[i] >= monotone.values[i - 1] - 1e-12);

    std::vector<std::vector<double>> bad = {std::vector<double>(n, 0.0)};
    CHECK_THROWS_AS(energy_concentration(spec, bad, {0.5}), ArgumentError);
    CHECK_THROWS_AS(energy_concentration(spec, signals, {0.0}), ArgumentError);
}

TEST_CASE("kernel_norm: eigenvector identities and the linear-solve oracle") {
    SeededRng rng(10);
    auto m = build_model(MappingSpec::siren_first(6.0, 8, 2), {LayerSpec::sine(6.0, 8)}, rng);
    auto coords = image_grid_coords(4, 4);
    auto gram = gram_matrix(m, coords);
    auto spec = ntk_eigs(gram);
    const std::size_t n = spec.size();

    for (std::size_t i : {std::size_t{0}, std::size_t{3}, n - 1}) {
        if (!(spec.eig.eigenvalues[i] > 1e-10 * spec.eig.eigenvalues[0])) continue;
        double kn = kernel_norm(spec, spec.eig.eigenvector(i));
        CHECK(kn == doctest::Approx(1.0 / spec.eig.eigenvalues[i]).epsilon(1e-10));
    }

    {
        std::vector<double> g(n);
        const double a = 0.8, b = -1.7;
        for (std::size_t r = 0; r < n; ++r)
            g[r] = a * spec.eig.eigenvectors(r, 0) + b * spec.eig.eigenvectors(r, 1);
        double expect = a * a / spec.eig.eigenvalues[0] + b * b / spec.eig.eigenvalues[1];
        CHECK(kernel_norm(spec, g) == doctest::Approx(expect).epsilon(1e-10));
    }

    // irregular signal vs g^T Theta^{-1} g via Gaussian elimination
    {
        std::vector<double> g(n);
        for (auto& v : g) v = rng.uniform(-1.0, 1.0);
        Matrix a = gram.matrix;
        std::vector<double> x = g;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(x[k], x[piv]);
            for (std::size_t i = k + 1; i < n; ++i) {
                double f = a(i, k) / a(k, k);
                x[i] -= f * x[k];
                for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            }
        }
        std::vector<double> sol(n);
        for (std::size_t k = n; k-- > 0;) {
            double s = x[k];
            for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * sol[j];
            sol[k] = s / a(k, k);
        }
        double oracle = 0.0;
        for (std::size_t i = 0; i < n; ++i) oracle += g[i] * sol[i];
        CHECK(kernel_norm(spec, g, 0.0) == doctest::Approx(oracle).epsilon(1e-6));
    }

    CHECK_THROWS_AS(kernel_norm(spec, std::vector<double>(n, 1.0), 2.0), NumericError);
}

TEST_CASE("export_eigenfunctions: constant, rank-1 and quantization round-trip") {
    namespace fs = std::filesystem;
    fs::create_directories("ntk_export_test");

    // constant eigenvector (Gram of all-ones) renders mid-gray
    {
        const std::size_t n = 16;
        Matrix ones(n, n);
        for (auto& v : ones.data) v = 1.0;
        auto spec = ntk_eigs(gram_from_matrix(std::move(ones), 4, 4));
        export_eigenfunctions(spec, 1, "ntk_export_test");
        auto img = load_pgm_matrix("ntk_export_test/eig_0.pgm");
        for (double v : img.data) CHECK(v == doctest::Approx(128.0 / 255.0).epsilon(1e-12));
    }

    // rank-1 Gram built from an "image" vector reproduces it up to scaling
    {
        SeededRng rng(11);
        const std::size_t n = 64;
        std::vector<double> image(n);
        for (std::size_t i = 0; i < n; ++i) image[i] = 0.5 + 0.4 * std::sin(double(i) * 0.37);
        Matrix rank1(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) rank1(i, j) = image[i] * image[j];
        auto spec = ntk_eigs(gram_from_matrix(std::move(rank1), 8, 8));
        export_eigenfunctions(spec, 1, "ntk_export_test");
        auto img = load_pgm_matrix("ntk_export_test/eig_0.pgm");

        auto corr = [](const std::vector<double>& a, const std::vector<double>& b) {
            double ma = 0.0, mb = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                ma += a[i];
                mb += b[i];
            }
            ma /= double(a.size());
            mb /= double(b.size());
            double num = 0.0, da = 0.0, db = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                num += (a[i] - ma) * (b[i] - mb);
                da += (a[i] - ma) * (a[i] - ma);
                db += (b[i] - mb) * (b[i] - mb);
            }
            return num / std::sqrt(da * db);
        };
        CHECK(std::fabs(corr(img.data, spec.eig.eigenvector(0))) >= 0.999);
        CHECK(std::fabs(corr(img.data, image)) >= 0.999);
    }

    // a spectrum without grid shape cannot be exported
    {
        auto spec = ntk_eigs(gram_from_matrix(Matrix::identity(5)));
        CHECK_THROWS_AS(export_eigenfunctions(spec, 1, "ntk_export_test"), ShapeError);
    }
    fs::remove_all("ntk_export_test");
}
