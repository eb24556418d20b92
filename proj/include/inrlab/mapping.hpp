#ifndef INRLAB_MAPPING_HPP
#define INRLAB_MAPPING_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "inrlab/dual.hpp"
#include "inrlab/errors.hpp"
#include "inrlab/matrix.hpp"
#include "inrlab/rng.hpp"

namespace inrlab {

// Input mapping gamma(r) = sin(Omega r + phi). Every variant lowers to that
// form; what differs is how Omega/phi are produced and which of them are
// free parameters when the mapping is marked trainable.
//
//   fourier-random         Omega_{t,:} ~ N(0, sigma^2), outputs the pair
//                          [sin, cos] per frequency row; trainable: Omega
//   fourier-deterministic  rows pi*2^l*e_d per level l and axis d, same
//                          sin/cos pairing; trainable: Omega
//   single-frequency       [cos(2 pi f r_d), sin(2 pi f r_d)] per axis;
//                          trainable: the scalar f
//   siren-first            sin(omega0*(W r + b)); trainable: W then b
//   explicit               Omega and phi given verbatim; trainable: both
enum class MappingVariant {
    FourierRandom,
    FourierDeterministic,
    SingleFrequency,
    SirenFirst,
    Explicit,
};

struct MappingSpec {
    MappingVariant variant = MappingVariant::SirenFirst;
    std::size_t input_dim = 1;
    bool trainable = false;

    double sigma = 10.0;      // fourier-random
    std::size_t rows = 0;     // fourier-random frequency count T
    std::size_t levels = 0;   // fourier-deterministic
    double f0 = 1.0;          // single-frequency
    double omega0 = 30.0;     // siren-first
    std::size_t width = 0;    // siren-first
    Matrix omega;             // explicit: T x D
    std::vector<double> phase; // explicit: T

    static MappingSpec fourier_random(double sigma, std::size_t t, std::size_t d,
                                      bool trainable = false) {
        MappingSpec m;
        m.variant = MappingVariant::FourierRandom;
        m.sigma = sigma;
        m.rows = t;
        m.input_dim = d;
        m.trainable = trainable;
        return m;
    }

    static MappingSpec fourier_deterministic(std::size_t levels, std::size_t d) {
        MappingSpec m;
        m.variant = MappingVariant::FourierDeterministic;
        m.levels = levels;
        m.input_dim = d;
        return m;
    }

    static MappingSpec single_frequency(double f0, std::size_t d, bool trainable = false) {
        MappingSpec m;
        m.variant = MappingVariant::SingleFrequency;
        m.f0 = f0;
        m.input_dim = d;
        m.trainable = trainable;
        return m;
    }

    // The first SIREN layer doubles as the mapping; it is trainable unless
    // the caller freezes it (the frozen form is what Sec. 4-style support
    // arguments need).
    static MappingSpec siren_first(double omega0, std::size_t width, std::size_t d,
                                   bool trainable = true) {
        MappingSpec m;
        m.variant = MappingVariant::SirenFirst;
        m.omega0 = omega0;
        m.width = width;
        m.input_dim = d;
        m.trainable = trainable;
        return m;
    }

    static MappingSpec explicit_map(Matrix omega, std::vector<double> phase,
                                    bool trainable = false) {
        MappingSpec m;
        m.variant = MappingVariant::Explicit;
        m.input_dim = omega.cols;
        m.omega = std::move(omega);
        m.phase = std::move(phase);
        m.trainable = trainable;
        return m;
    }

    void validate() const {
        if (input_dim == 0) throw ConfigError("mapping: input_dim must be >= 1");
        switch (variant) {
        case MappingVariant::FourierRandom:
            if (rows == 0) throw ConfigError("fourier-random: needs at least one frequency row");
            if (!(sigma > 0.0)) throw ConfigError("fourier-random: sigma must be positive");
            break;
        case MappingVariant::FourierDeterministic:
            if (levels == 0) throw ConfigError("fourier-deterministic: needs at least one level");
            break;
        case MappingVariant::SingleFrequency:
            if (!(f0 > 0.0)) throw ConfigError("single-frequency: f0 must be positive");
            break;
        case MappingVariant::SirenFirst:
            if (width == 0) throw ConfigError("siren-first: width must be >= 1");
            if (!(omega0 > 0.0)) throw ConfigError("siren-first: omega0 must be positive");
            break;
        case MappingVariant::Explicit:
            if (omega.rows == 0 || omega.cols != input_dim)
                throw ConfigError("explicit mapping: Omega must be T x D with T >= 1");
            if (phase.size() != omega.rows)
                throw ConfigError("explicit mapping: phase length must match Omega rows");
            if (!omega.all_finite()) throw ConfigError("explicit mapping: Omega must be finite");
            break;
        }
    }

    // Number of gamma outputs (the first MLP fan-in).
    std::size_t output_dim() const {
        switch (variant) {
        case MappingVariant::FourierRandom: return 2 * rows;
        case MappingVariant::FourierDeterministic: return 2 * levels * input_dim;
        case MappingVariant::SingleFrequency: return 2 * input_dim;
        case MappingVariant::SirenFirst: return width;
        case MappingVariant::Explicit: return omega.rows;
        }
        return 0;
    }

    // Free parameters (zero when the mapping is frozen into the model).
    std::size_t param_count() const {
        if (!trainable) return 0;
        switch (variant) {
        case MappingVariant::FourierRandom: return rows * input_dim;
        case MappingVariant::FourierDeterministic: return levels * input_dim * input_dim;
        case MappingVariant::SingleFrequency: return 1;
        case MappingVariant::SirenFirst: return width * input_dim + width;
        case MappingVariant::Explicit: return omega.rows * input_dim + omega.rows;
        }
        return 0;
    }

    // Size of the underlying parameter block regardless of trainability.
    std::size_t storage_count() const {
        switch (variant) {
        case MappingVariant::FourierRandom: return rows * input_dim;
        case MappingVariant::FourierDeterministic: return levels * input_dim * input_dim;
        case MappingVariant::SingleFrequency: return 1;
        case MappingVariant::SirenFirst: return width * input_dim + width;
        case MappingVariant::Explicit: return omega.rows * input_dim + omega.rows;
        }
        return 0;
    }

    // Initial values of the mapping parameter block.
    std::vector<double> initial_params(SeededRng& rng) const {
        std::vector<double> p;
        switch (variant) {
        case MappingVariant::FourierRandom:
            p = draw_normal(rng, 0.0, sigma, rows * input_dim);
            break;
        case MappingVariant::FourierDeterministic: {
            // rows pi * 2^l * e_d, one per (level, axis)
            p.assign(levels * input_dim * input_dim, 0.0);
            std::size_t t = 0;
            for (std::size_t l = 0; l < levels; ++l)
                for (std::size_t d = 0; d < input_dim; ++d, ++t)
                    p[t * input_dim + d] = std::numbers::pi * std::ldexp(1.0, int(l));
            break;
        }
        case MappingVariant::SingleFrequency:
            p.assign(1, f0);
            break;
        case MappingVariant::SirenFirst: {
            double bound = 1.0 / static_cast<double>(input_dim);
            p = draw_uniform(rng, -bound, bound, width * input_dim);
            p.resize(width * input_dim + width, 0.0); // zero biases
            break;
        }
        case MappingVariant::Explicit:
            p.reserve(omega.data.size() + phase.size());
            p.insert(p.end(), omega.data.begin(), omega.data.end());
            p.insert(p.end(), phase.begin(), phase.end());
            break;
        }
        return p;
    }

    // Effective frequency matrix (T x D) and phases of the lowered form
    // sin(Omega r + phi), given the current parameter block. This is what
    // harmonic-support analysis consumes.
    void effective_frequencies(const std::vector<double>& params, Matrix& freq,
                               std::vector<double>& phi) const {
        const double half_pi = 0.5 * std::numbers::pi;
        switch (variant) {
        case MappingVariant::FourierRandom:
        case MappingVariant::FourierDeterministic: {
            std::size_t t_rows = (variant == MappingVariant::FourierRandom)
                                     ? rows
                                     : levels * input_dim;
            freq = Matrix(t_rows, input_dim);
            std::copy(params.begin(), params.begin() + t_rows * input_dim, freq.data.begin());
            phi.assign(t_rows, 0.0); // sin/cos pairs share the frequency row
            break;
        }
        case MappingVariant::SingleFrequency: {
            freq = Matrix(input_dim, input_dim);
            for (std::size_t d = 0; d < input_dim; ++d)
                freq(d, d) = 2.0 * std::numbers::pi * params[0];
            phi.assign(input_dim, 0.0);
            break;
        }
        case MappingVariant::SirenFirst: {
            freq = Matrix(width, input_dim);
            for (std::size_t i = 0; i < width * input_dim; ++i)
                freq.data[i] = omega0 * params[i];
            phi.resize(width);
            for (std::size_t i = 0; i < width; ++i)
                phi[i] = omega0 * params[width * input_dim + i];
            break;
        }
        case MappingVariant::Explicit: {
            freq = Matrix(omega.rows, input_dim);
            std::copy(params.begin(), params.begin() + omega.rows * input_dim,
                      freq.data.begin());
            phi.assign(params.begin() + omega.rows * input_dim, params.end());
            (void)half_pi;
            break;
        }
        }
    }
};

namespace detail {

// gamma forward for one coordinate. `angles` receives the sin() arguments
// (needed by the backward pass), `out` the activations.
template <class S>
void mapping_forward_one(const MappingSpec& spec, const S* p, const double* r,
                         S* angles, S* out) {
    const double half_pi = 0.5 * std::numbers::pi;
    const double two_pi = 2.0 * std::numbers::pi;
    switch (spec.variant) {
    case MappingVariant::FourierRandom:
    case MappingVariant::FourierDeterministic: {
        const std::size_t t_rows = spec.output_dim() / 2;
        const std::size_t d = spec.input_dim;
        for (std::size_t t = 0; t < t_rows; ++t) {
            S a = S(0.0);
            for (std::size_t j = 0; j < d; ++j) a += p[t * d + j] * S(r[j]);
            angles[2 * t] = a;
            angles[2 * t + 1] = a + S(half_pi);
            out[2 * t] = sin(a);
            out[2 * t + 1] = sin(angles[2 * t + 1]);
        }
        break;
    }
    case MappingVariant::SingleFrequency: {
        for (std::size_t j = 0; j < spec.input_dim; ++j) {
            S a = p[0] * S(two_pi * r[j]);
            angles[2 * j] = a + S(half_pi);   // cos component
            angles[2 * j + 1] = a;            // sin component
            out[2 * j] = sin(angles[2 * j]);
            out[2 * j + 1] = sin(a);
        }
        break;
    }
    case MappingVariant::SirenFirst: {
        const std::size_t d = spec.input_dim;
        const S* w = p;
        const S* b = p + spec.width * d;
        for (std::size_t u = 0; u < spec.width; ++u) {
            S a = b[u];
            for (std::size_t j = 0; j < d; ++j) a += w[u * d + j] * S(r[j]);
            a = S(spec.omega0) * a;
            angles[u] = a;
            out[u] = sin(a);
        }
        break;
    }
    case MappingVariant::Explicit: {
        const std::size_t t_rows = spec.omega.rows;
        const std::size_t d = spec.input_dim;
        const S* om = p;
        const S* ph = p + t_rows * d;
        for (std::size_t t = 0; t < t_rows; ++t) {
            S a = ph[t];
            for (std::size_t j = 0; j < d; ++j) a += om[t * d + j] * S(r[j]);
            angles[t] = a;
            out[t] = sin(a);
        }
        break;
    }
    }
}

// Accumulates d(loss)/d(mapping params) for one coordinate given
// d(loss)/d(angle); no-op contributions are simply zero.
template <class S>
void mapping_backward_one(const MappingSpec& spec, const double* r, const S* d_angle,
                          S* d_params) {
    const double two_pi = 2.0 * std::numbers::pi;
    switch (spec.variant) {
    case MappingVariant::FourierRandom:
    case MappingVariant::FourierDeterministic: {
        const std::size_t t_rows = spec.output_dim() / 2;
        const std::size_t d = spec.input_dim;
        for (std::size_t t = 0; t < t_rows; ++t) {
            S g = d_angle[2 * t] + d_angle[2 * t + 1];
            for (std::size_t j = 0; j < d; ++j) d_params[t * d + j] += g * S(r[j]);
        }
        break;
    }
    case MappingVariant::SingleFrequency: {
        for (std::size_t j = 0; j < spec.input_dim; ++j) {
            S g = d_angle[2 * j] + d_angle[2 * j + 1];
            d_params[0] += g * S(two_pi * r[j]);
        }
        break;
    }
    case MappingVariant::SirenFirst: {
        const std::size_t d = spec.input_dim;
        for (std::size_t u = 0; u < spec.width; ++u) {
            S g = S(spec.omega0) * d_angle[u];
            for (std::size_t j = 0; j < d; ++j) d_params[u * d + j] += g * S(r[j]);
            d_params[spec.width * d + u] += g;
        }
        break;
    }
    case MappingVariant::Explicit: {
        const std::size_t t_rows = spec.omega.rows;
        const std::size_t d = spec.input_dim;
        for (std::size_t t = 0; t < t_rows; ++t) {
            for (std::size_t j = 0; j < d; ++j)
                d_params[t * d + j] += d_angle[t] * S(r[j]);
            d_params[t_rows * d + t] += d_angle[t];
        }
        break;
    }
    }
}

} // namespace detail

} // namespace inrlab

#endif
