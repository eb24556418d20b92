#ifndef INRLAB_HARMONICS_HPP
#define INRLAB_HARMONICS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "inrlab/bessel.hpp"
#include "inrlab/csv.hpp"
#include "inrlab/errors.hpp"
#include "inrlab/fft.hpp"
#include "inrlab/matrix.hpp"
#include "inrlab/model.hpp"

namespace inrlab {

// One sinusoid amplitude*sin(<frequency, r> + phase). Canonical form: the
// first nonzero frequency component is nonnegative (the sign is folded into
// the phase), amplitude >= 0, phase in [0, 2pi).
struct HarmonicAtom {
    std::vector<double> frequency;
    double amplitude = 0.0;
    double phase = 0.0;

    double evaluate(const double* r) const {
        double x = phase;
        for (std::size_t d = 0; d < frequency.size(); ++d) x += frequency[d] * r[d];
        return amplitude * std::sin(x);
    }
};

struct HarmonicSet {
    std::size_t dim = 1;
    std::vector<HarmonicAtom> atoms;
    std::string provenance = "enumerated";

    // CSV schema: freq_0..freq_{D-1},amplitude,phase, descending |amplitude|.
    void write_csv(const std::string& path) const {
        std::vector<std::string> header;
        for (std::size_t d = 0; d < dim; ++d) header.push_back("freq_" + std::to_string(d));
        header.push_back("amplitude");
        header.push_back("phase");
        CsvWriter csv(path, header);
        std::vector<const HarmonicAtom*> order;
        order.reserve(atoms.size());
        for (const auto& a : atoms) order.push_back(&a);
        std::stable_sort(order.begin(), order.end(), [](const HarmonicAtom* a, const HarmonicAtom* b) {
            return std::fabs(a->amplitude) > std::fabs(b->amplitude);
        });
        for (const auto* a : order) {
            std::vector<double> row(a->frequency.begin(), a->frequency.end());
            row.push_back(a->amplitude);
            row.push_back(a->phase);
            csv.row(row);
        }
    }
};

// Harmonic budget K^(L-1) of a depth-L network with degree-K activations.
struct SupportBudget {
    std::size_t degree = 1; // K
    std::size_t layers = 2; // L

    static SupportBudget from_poly(std::size_t k, std::size_t l) { return {k, l}; }
    static SupportBudget from_budget(std::size_t b) { return {b, 2}; }

    std::size_t budget() const {
        if (degree < 1 || layers < 2)
            throw ArgumentError("support budget: needs K >= 1 and L >= 2");
        double b = std::pow(double(degree), double(layers - 1));
        if (b > 1e15) throw ResourceError("support budget K^(L-1) overflows any usable cap");
        return static_cast<std::size_t>(std::llround(b));
    }
};

namespace detail {

// Number of integer vectors s in Z^T with sum |s_t| <= b (computed in
// doubles; only compared against the enumeration cap).
inline double l1_lattice_count(std::size_t t, std::size_t b) {
    std::vector<double> cur(b + 1, 1.0); // t = 0
    for (std::size_t dim = 1; dim <= t; ++dim) {
        std::vector<double> next(b + 1, 0.0);
        for (std::size_t budget = 0; budget <= b; ++budget) {
            double s = cur[budget]; // s_dim = 0
            for (std::size_t a = 1; a <= budget; ++a) s += 2.0 * cur[budget - a];
            next[budget] = s;
            if (next[budget] > 1e18) return 1e18;
        }
        cur = std::move(next);
    }
    return cur[b];
}

inline void canonicalize_direction(std::vector<double>& w, std::complex<double>& z) {
    for (double c : w) {
        if (c > 0.0) return;
        if (c < 0.0) {
            for (auto& v : w) v = -v;
            // Im(z e^{-jx}) == Im(-conj(z) e^{jx})
            z = -std::conj(z);
            return;
        }
    }
    // zero frequency: the atom is the constant Im(z)
    z = std::complex<double>(0.0, z.imag());
}

struct PhasorAtom {
    std::vector<double> frequency;
    std::complex<double> phasor; // amplitude * e^{j*phase}
};

// Sort by frequency, merge phasors of coinciding frequencies, drop the
// identically-zero ones, emit canonical atoms.
inline std::vector<HarmonicAtom> merge_atoms(std::vector<PhasorAtom>& raw, double tol) {
    std::stable_sort(raw.begin(), raw.end(), [](const PhasorAtom& a, const PhasorAtom& b) {
        return std::lexicographical_compare(a.frequency.begin(), a.frequency.end(),
                                            b.frequency.begin(), b.frequency.end());
    });
    std::vector<HarmonicAtom> out;
    std::size_t i = 0;
    while (i < raw.size()) {
        std::vector<double> freq = raw[i].frequency;
        std::complex<double> z = raw[i].phasor;
        std::size_t j = i + 1;
        while (j < raw.size()) {
            double dist2 = 0.0;
            for (std::size_t d = 0; d < freq.size(); ++d) {
                double diff = raw[j].frequency[d] - freq[d];
                dist2 += diff * diff;
            }
            if (dist2 > tol * tol) break;
            z += raw[j].phasor;
            ++j;
        }
        i = j;
        double amp = std::abs(z);
        if (amp != 0.0) {
            HarmonicAtom a;
            a.frequency = std::move(freq);
            a.amplitude = amp;
            a.phase = std::arg(z);
            if (a.phase < 0.0) a.phase += 2.0 * std::numbers::pi;
            out.push_back(std::move(a));
        }
    }
    return out;
}

} // namespace detail

// All distinct frequency vectors sum_t s_t Omega_t over the integer lattice
// sum|s_t| <= budget, canonicalized and deduplicated. This is the superset
// H(Omega) that bounds what the architecture can express; which points are
// attained depends on the weights, so spectrum checks assert containment
// only.
inline std::vector<std::vector<double>> harmonic_support(const Matrix& omega,
                                                         const SupportBudget& budget,
                                                         double dedup_tol = 1e-9,
                                                         std::size_t lattice_cap = 10000000) {
    if (omega.rows == 0 || omega.cols == 0)
        throw ArgumentError("harmonic_support: Omega must be nonempty");
    const std::size_t t_rows = omega.rows;
    const std::size_t d = omega.cols;
    const std::size_t b = budget.budget();

    if (detail::l1_lattice_count(t_rows, b) > double(lattice_cap))
        throw ResourceError("harmonic_support: lattice exceeds the enumeration cap; "
                            "reduce the budget or the number of frequency rows");

    std::vector<detail::PhasorAtom> raw;
    std::vector<double> acc(d, 0.0);
    // depth-first over s_0..s_{T-1} with the remaining l1 budget
    auto recurse = [&](auto&& self, std::size_t t, std::size_t remaining) -> void {
        if (t == t_rows) {
            detail::PhasorAtom a;
            a.frequency = acc;
            // unit "cos" phasor: survives canonicalization even at frequency 0
            a.phasor = std::complex<double>(0.0, 1.0);
            detail::canonicalize_direction(a.frequency, a.phasor);
            raw.push_back(std::move(a));
            return;
        }
        const double* row = omega.row(t);
        for (long s = -long(remaining); s <= long(remaining); ++s) {
            for (std::size_t k = 0; k < d; ++k) acc[k] += double(s) * row[k];
            self(self, t + 1, remaining - std::size_t(std::labs(s)));
            for (std::size_t k = 0; k < d; ++k) acc[k] -= double(s) * row[k];
        }
    };
    recurse(recurse, 0, b);

    auto merged = detail::merge_atoms(raw, dedup_tol);
    std::vector<std::vector<double>> support;
    support.reserve(merged.size());
    for (auto& a : merged) support.push_back(std::move(a.frequency));
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    return support;
}

// sum over atoms of amplitude*sin(<freq, r> + phase) per coordinate.
inline std::vector<double> evaluate_harmonic_set(const HarmonicSet& set,
                                                 const std::vector<double>& coords) {
    if (set.dim == 0 || coords.size() % set.dim != 0)
        throw ArgumentError("evaluate_harmonic_set: coordinate block mismatch");
    for (const auto& a : set.atoms)
        if (a.frequency.size() != set.dim)
            throw ArgumentError("evaluate_harmonic_set: atom dimension mismatch");
    const std::size_t n = coords.size() / set.dim;
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = coords.data() + i * set.dim;
        double s = 0.0;
        for (const auto& a : set.atoms) s += a.evaluate(r);
        out[i] = s;
    }
    return out;
}

// Bessel-series expansion of the three-layer SIREN
// f(r) = w2^T sin(Weff sin(Omega r)): one atom per multi-index |s_t| <= S
// with coefficient (prod_t J_{s_t}(Weff_{m,t})) * w2_m, merged over m and
// coinciding frequencies.
inline HarmonicSet siren_bessel_expansion(const InrModel& m, std::size_t truncation) {
    if (m.input_dim() != 1)
        throw ShapeError("bessel expansion: requires a one-dimensional input");
    if (m.hidden.size() != 1 || m.hidden[0].activation != Activation::Sine)
        throw ShapeError("bessel expansion: requires exactly one sine hidden layer");
    if (truncation == 0 || truncation > 64)
        throw DomainError("bessel expansion: truncation must lie in [1, 64]");

    // lowered mapping: pure sin(Omega r) with zero phases
    std::vector<double> map_params(m.mapping.storage_count());
    if (m.mapping.trainable)
        std::copy(m.theta.begin(), m.theta.begin() + map_params.size(), map_params.begin());
    else
        map_params = m.frozen_mapping;
    Matrix freq;
    std::vector<double> phi;
    m.mapping.effective_frequencies(map_params, freq, phi);
    if (freq.rows != m.mapping.output_dim())
        throw ShapeError("bessel expansion: mapping must expose one sinusoid per output "
                         "(siren-first or explicit)");
    for (double p : phi)
        if (std::fabs(p) > 1e-12)
            throw ShapeError("bessel expansion: mapping phases must be zero");

    const std::size_t t_rows = freq.rows;
    const auto& wd = m.layout.find("layer0.w");
    const auto& bd = m.layout.find("layer0.b");
    const auto& od = m.layout.find("out.w");
    for (std::size_t i = 0; i < bd.count(); ++i)
        if (std::fabs(m.theta[bd.offset + i]) > 1e-12)
            throw ShapeError("bessel expansion: hidden biases must be zero");
    if (std::fabs(m.theta[m.layout.find("out.b").offset]) > 1e-12)
        throw ShapeError("bessel expansion: output bias must be zero");

    const std::size_t f_units = m.hidden[0].width;
    const double omega0 = m.hidden[0].omega0;
    const long s_max = long(truncation);

    std::vector<detail::PhasorAtom> raw;
    std::vector<std::vector<double>> jtab(t_rows, std::vector<double>(2 * truncation + 1));
    for (std::size_t unit = 0; unit < f_units; ++unit) {
        const double w2 = m.theta[od.offset + unit];
        for (std::size_t t = 0; t < t_rows; ++t) {
            const double weff = omega0 * m.theta[wd.offset + unit * t_rows + t];
            for (long s = -s_max; s <= s_max; ++s)
                jtab[t][std::size_t(s + s_max)] = bessel_j(int(s), weff);
        }
        std::vector<long> s_vec(t_rows, -s_max);
        while (true) {
            double coeff = w2;
            double w_total = 0.0;
            for (std::size_t t = 0; t < t_rows; ++t) {
                coeff *= jtab[t][std::size_t(s_vec[t] + s_max)];
                w_total += double(s_vec[t]) * freq(t, 0);
            }
            if (coeff != 0.0) {
                detail::PhasorAtom a;
                a.frequency = {w_total};
                a.phasor = std::complex<double>(coeff, 0.0);
                detail::canonicalize_direction(a.frequency, a.phasor);
                raw.push_back(std::move(a));
            }
            std::size_t t = 0;
            while (t < t_rows && ++s_vec[t] > s_max) {
                s_vec[t] = -s_max;
                ++t;
            }
            if (t == t_rows) break;
        }
    }

    HarmonicSet set;
    set.dim = 1;
    set.provenance = "bessel-expansion(S=" + std::to_string(truncation) + ")";
    set.atoms = detail::merge_atoms(raw, 1e-9);
    return set;
}

// Least-squares polynomial surrogate of an activation on a uniform grid,
// solved by Householder QR (the normal-equations route stays in the tests
// as the independent oracle).
inline std::vector<double> fit_polynomial_activation(Activation act, double omega0,
                                                     std::size_t degree, double a, double b,
                                                     std::size_t grid_n) {
    if (!(a < b)) throw ArgumentError("fit_polynomial_activation: requires a < b");
    if (grid_n < degree + 1)
        throw FitError("fit_polynomial_activation: grid too small for the requested degree");

    const std::size_t n = grid_n, p = degree + 1;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = a + (b - a) * double(i) / double(n - 1);
        LayerSpec l;
        l.activation = act;
        l.omega0 = omega0;
        if (act == Activation::Polynomial) throw ArgumentError("fit target must be non-polynomial");
        y[i] = detail::apply_activation(l, x[i]);
    }

    Matrix v(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        double pw = 1.0;
        for (std::size_t j = 0; j < p; ++j) {
            v(i, j) = pw;
            pw *= x[i];
        }
    }

    // Householder QR of V, applying the reflections to y in lockstep
    for (std::size_t k = 0; k < p; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += v(i, k) * v(i, k);
        norm = std::sqrt(norm);
        if (norm <= 1e-12) throw FitError("fit_polynomial_activation: rank-deficient design");
        if (v(k, k) < 0.0) norm = -norm;
        for (std::size_t i = k; i < n; ++i) v(i, k) /= norm;
        v(k, k) += 1.0;
        for (std::size_t j = k + 1; j < p; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < n; ++i) s += v(i, k) * v(i, j);
            s = -s / v(k, k);
            for (std::size_t i = k; i < n; ++i) v(i, j) += s * v(i, k);
        }
        double s = 0.0;
        for (std::size_t i = k; i < n; ++i) s += v(i, k) * y[i];
        s = -s / v(k, k);
        for (std::size_t i = k; i < n; ++i) y[i] += s * v(i, k);
        v(k, k) = -norm; // stash the R diagonal
    }

    std::vector<double> alpha(p);
    for (std::size_t k = p; k-- > 0;) {
        double s = y[k];
        for (std::size_t j = k + 1; j < p; ++j) s -= v(k, j) * alpha[j];
        alpha[k] = s / v(k, k);
    }
    return alpha;
}

// Fraction of spectral energy outside the support bins; zero for an empty
// spectrum.
inline double off_support_energy(const ComplexSpectrum& spec,
                                 const std::vector<std::size_t>& support_bins) {
    double total = spec.total_power();
    if (total == 0.0) return 0.0;
    std::vector<std::uint8_t> on(spec.size(), 0);
    for (std::size_t idx : support_bins) {
        if (idx >= spec.size()) throw ArgumentError("off_support_energy: bin index out of range");
        on[idx] = 1;
    }
    double on_energy = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i)
        if (on[i]) on_energy += spec.power(i);
    return (total - on_energy) / total;
}

// Maps 1D support frequencies (rad/unit) to DFT bin indices of an n-sample
// grid covering `period` units; each frequency lands on bins +-k (mod n).
inline std::vector<std::size_t> support_bins_1d(const std::vector<std::vector<double>>& support,
                                                double period, std::size_t n,
                                                double tol = 1e-6) {
    std::vector<std::size_t> bins;
    for (const auto& w : support) {
        double cycles = std::fabs(w[0]) * period / (2.0 * std::numbers::pi);
        double k = std::round(cycles);
        if (std::fabs(cycles - k) > tol) continue; // off-grid frequency cannot alias to a clean bin
        std::size_t kk = std::size_t(k);
        kk %= n;
        bins.push_back(kk);
        bins.push_back((n - kk) % n);
    }
    std::sort(bins.begin(), bins.end());
    bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
    return bins;
}

// 2D counterpart for an image grid (rows x cols spanning `period` in each
// axis, coords ordered (x, y)); emits row-major bin indices for +-frequency.
inline std::vector<std::size_t> support_bins_2d(const std::vector<std::vector<double>>& support,
                                                double period, std::size_t rows, std::size_t cols,
                                                double tol = 1e-6) {
    std::vector<std::size_t> bins;
    auto push = [&](long kx, long ky) {
        long bx = ((kx % long(cols)) + long(cols)) % long(cols);
        long by = ((ky % long(rows)) + long(rows)) % long(rows);
        bins.push_back(std::size_t(by) * cols + std::size_t(bx));
    };
    for (const auto& w : support) {
        double cx = w[0] * period / (2.0 * std::numbers::pi);
        double cy = w[1] * period / (2.0 * std::numbers::pi);
        double kx = std::round(cx), ky = std::round(cy);
        if (std::fabs(cx - kx) > tol || std::fabs(cy - ky) > tol) continue;
        push(long(kx), long(ky));
        push(-long(kx), -long(ky));
    }
    std::sort(bins.begin(), bins.end());
    bins.erase(std::unique(bins.begin(), bins.end()), bins.end());
    return bins;
}

} // namespace inrlab

#endif
