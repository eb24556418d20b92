#ifndef INRLAB_NTK_HPP
#define INRLAB_NTK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "inrlab/csv.hpp"
#include "inrlab/eig.hpp"
#include "inrlab/errors.hpp"
#include "inrlab/matrix.hpp"
#include "inrlab/model.hpp"
#include "inrlab/pgm.hpp"

namespace inrlab {

// Empirical NTK evaluated on a coordinate grid: entry (i,j) is
// <grad_theta f(r_i), grad_theta f(r_j)> at the model's current weights.
struct GramMatrix {
    Matrix matrix;
    std::vector<double> coords;
    std::size_t dim = 2;
    std::size_t grid_rows = 0;
    std::size_t grid_cols = 0;
    std::uint64_t fingerprint = 0;
};

// Eigen-dictionary of the Gram matrix: descending eigenvalues with
// sign-fixed orthonormal eigenvectors (discrete eigenfunctions).
struct NtkSpectrum {
    EigenDecomposition eig;
    std::vector<double> coords;
    std::size_t dim = 2;
    std::size_t grid_rows = 0;
    std::size_t grid_cols = 0;
    std::uint64_t fingerprint = 0;

    std::size_t size() const { return eig.eigenvalues.size(); }

    void write_eigenvalues_csv(const std::string& path) const {
        CsvWriter csv(path, {"index", "lambda", "lambda_rel"});
        const double top = eig.eigenvalues.empty() ? 1.0 : eig.eigenvalues[0];
        for (std::size_t i = 0; i < eig.eigenvalues.size(); ++i)
            csv.row({double(i), eig.eigenvalues[i], eig.eigenvalues[i] / top});
    }
};

// E(lambda) per relative-eigenvalue threshold, averaged over signals.
struct EnergyProfile {
    std::vector<double> thresholds; // descending
    std::vector<double> values;     // nondecreasing as thresholds fall
    std::size_t signal_count = 0;

    void write_csv(const std::string& path) const {
        CsvWriter csv(path, {"threshold", "E"});
        for (std::size_t i = 0; i < thresholds.size(); ++i)
            csv.row({thresholds[i], values[i]});
    }
};

// Assembles the Gram matrix from per-coordinate gradients. The Jacobian is
// built in row batches (batch_size coordinates at a time); the result is
// bitwise independent of batch_size. Upper triangle is computed, then
// mirrored, so the output is exactly symmetric.
inline GramMatrix gram_matrix(const InrModel& model, const std::vector<double>& coords,
                              std::size_t batch_size = 64,
                              std::size_t memory_budget_doubles = (std::size_t{1} << 28)) {
    const std::size_t d = model.input_dim();
    if (d == 0 || coords.size() % d != 0)
        throw ArgumentError("gram_matrix: coordinate block does not match input_dim");
    const std::size_t n = coords.size() / d;
    const std::size_t p = model.param_count();
    if (n == 0) throw ArgumentError("gram_matrix: empty coordinate set");
    if (batch_size == 0) batch_size = 1;
    if (n * p > memory_budget_doubles)
        throw ResourceError("gram_matrix: Jacobian of " + std::to_string(n) + "x" +
                            std::to_string(p) + " doubles exceeds the memory budget; "
                            "use a smaller grid");

    Matrix j(n, p);
    Matrix chunk_j;
    for (std::size_t b = 0; b < n; b += batch_size) {
        const std::size_t e = std::min(n, b + batch_size);
        std::vector<double> chunk(coords.begin() + b * d, coords.begin() + e * d);
        jacobian(model, chunk, chunk_j);
        std::copy(chunk_j.data.begin(), chunk_j.data.end(), j.data.begin() + b * p);
    }

    GramMatrix g;
    g.matrix = Matrix(n, n);
    g.coords = coords;
    g.dim = d;
    g.fingerprint = model_fingerprint(model);
    Matrix& out = g.matrix;
    parallel_for(n, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i)
            for (std::size_t k = i; k < n; ++k)
                out(i, k) = dot_strided(j.row(i), j.row(k), p);
    }, 8);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < i; ++k) out(i, k) = out(k, i);
    return g;
}

// Full eigendecomposition of the Gram, eigenvalues descending, each
// eigenvector's largest-magnitude component made positive.
inline NtkSpectrum ntk_eigs(const GramMatrix& gram) {
    NtkSpectrum s;
    s.eig = sym_eig(gram.matrix);
    s.coords = gram.coords;
    s.dim = gram.dim;
    s.grid_rows = gram.grid_rows;
    s.grid_cols = gram.grid_cols;
    s.fingerprint = gram.fingerprint;

    Matrix& v = s.eig.eigenvectors;
    const std::size_t n = v.rows;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double a = std::fabs(v(i, col));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (v(arg, col) < 0.0)
            for (std::size_t i = 0; i < n; ++i) v(i, col) = -v(i, col);
    }
    return s;
}

// Coefficients <phi_i, g> of a grid signal in the eigenbasis.
inline std::vector<double> signal_coefficients(const NtkSpectrum& spec,
                                               const std::vector<double>& g) {
    const std::size_t n = spec.size();
    if (g.size() != n) throw ArgumentError("signal_coefficients: signal length mismatch");
    std::vector<double> c(n, 0.0);
    const Matrix& v = spec.eig.eigenvectors;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += v(r, i) * g[r];
        c[i] = s;
    }
    return c;
}

// Average energy concentration E(lambda): the fraction of each signal's
// energy carried by eigenfunctions with lambda_i/lambda_0 >= lambda,
// averaged over the signals. Denominator is <g,g> (first power), which
// makes E equal 1 at an all-inclusive threshold.
inline EnergyProfile energy_concentration(const NtkSpectrum& spec,
                                          const std::vector<std::vector<double>>& signals,
                                          std::vector<double> thresholds) {
    if (signals.empty()) throw ArgumentError("energy_concentration: no signals");
    for (double t : thresholds)
        if (!(t > 0.0 && t <= 1.0))
            throw ArgumentError("energy_concentration: thresholds must lie in (0, 1]");
    std::sort(thresholds.begin(), thresholds.end(), std::greater<double>());
    const std::size_t n = spec.size();
    const double top = spec.eig.eigenvalues.empty() ? 0.0 : spec.eig.eigenvalues[0];
    if (!(top > 0.0)) throw NumericError("energy_concentration: spectrum has no positive mass");

    // per-signal cumulative coefficient energy over descending eigenvalues
    std::vector<std::vector<double>> prefix(signals.size());
    for (std::size_t s = 0; s < signals.size(); ++s) {
        double norm2 = 0.0;
        for (double v : signals[s]) norm2 += v * v;
        if (norm2 == 0.0) throw ArgumentError("energy_concentration: zero-norm signal");
        auto coeff = signal_coefficients(spec, signals[s]);
        prefix[s].assign(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            prefix[s][i + 1] = prefix[s][i] + coeff[i] * coeff[i] / norm2;
    }

    EnergyProfile profile;
    profile.thresholds = thresholds;
    profile.signal_count = signals.size();
    for (double t : thresholds) {
        std::size_t k = 0;
        while (k < n && spec.eig.eigenvalues[k] / top >= t) ++k;
        double e = 0.0;
        for (const auto& p : prefix) e += p[k];
        profile.values.push_back(e / double(signals.size()));
    }
    return profile;
}

// Kernel norm sum (1/lambda_i) <phi_i, g>^2 over eigenpairs above the
// relative cutoff; near-null modes are excluded because the sum diverges on
// them.
inline double kernel_norm(const NtkSpectrum& spec, const std::vector<double>& g,
                          double eig_cutoff = 1e-10) {
    if (eig_cutoff < 0.0) throw ArgumentError("kernel_norm: cutoff must be nonnegative");
    const std::size_t n = spec.size();
    if (g.size() != n) throw ArgumentError("kernel_norm: signal length mismatch");
    const double top = spec.eig.eigenvalues.empty() ? 0.0 : spec.eig.eigenvalues[0];
    if (!(top > 0.0)) throw NumericError("kernel_norm: degenerate spectrum");

    auto coeff = signal_coefficients(spec, g);
    double s = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(spec.eig.eigenvalues[i] > eig_cutoff * top)) break;
        s += coeff[i] * coeff[i] / spec.eig.eigenvalues[i];
        ++used;
    }
    if (used == 0) throw NumericError("kernel_norm: every eigenvalue sits below the cutoff");
    return s;
}

// Writes the top-k eigenvectors as grayscale images (min-max scaled; a
// constant eigenvector becomes mid-gray) plus an index CSV.
inline std::vector<std::string> export_eigenfunctions(const NtkSpectrum& spec, std::size_t k,
                                                      const std::string& out_dir) {
    if (spec.grid_rows * spec.grid_cols != spec.size() || spec.grid_rows == 0)
        throw ShapeError("export_eigenfunctions: spectrum does not carry a 2D grid shape");
    if (k > spec.size()) throw ArgumentError("export_eigenfunctions: k exceeds the grid size");

    std::vector<std::string> files;
    CsvWriter csv(out_dir + "/eigenfunctions.csv", {"index", "lambda", "lambda_rel", "file"});
    const double top = spec.eig.eigenvalues[0];
    for (std::size_t i = 0; i < k; ++i) {
        Matrix img(spec.grid_rows, spec.grid_cols);
        double lo = 1e300, hi = -1e300;
        for (std::size_t r = 0; r < spec.size(); ++r) {
            double v = spec.eig.eigenvectors(r, i);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const bool constant = (hi - lo) <= 1e-9 * std::max({std::fabs(hi), std::fabs(lo), 1e-30});
        for (std::size_t r = 0; r < spec.size(); ++r) {
            double v = spec.eig.eigenvectors(r, i);
            img.data[r] = constant ? 128.0 / 255.0 : (v - lo) / (hi - lo);
        }
        std::string name = "eig_" + std::to_string(i) + ".pgm";
        save_pgm(img, out_dir + "/" + name);
        files.push_back(name);
        csv.raw_row({std::to_string(i), format_double(spec.eig.eigenvalues[i]),
                     format_double(spec.eig.eigenvalues[i] / top), name});
    }
    return files;
}

} // namespace inrlab

#endif
