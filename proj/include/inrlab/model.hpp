#ifndef INRLAB_MODEL_HPP
#define INRLAB_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "inrlab/dual.hpp"
#include "inrlab/errors.hpp"
#include "inrlab/mapping.hpp"
#include "inrlab/matrix.hpp"
#include "inrlab/rng.hpp"

namespace inrlab {

enum class Activation { Relu, Sine, Polynomial, Identity };

struct LayerSpec {
    std::size_t width = 1;
    Activation activation = Activation::Relu;
    double omega0 = 1.0;         // sine scale
    std::vector<double> poly;    // alpha_0..alpha_K

    static LayerSpec relu(std::size_t w) { return {w, Activation::Relu, 1.0, {}}; }
    static LayerSpec sine(double omega0, std::size_t w) {
        return {w, Activation::Sine, omega0, {}};
    }
    static LayerSpec polynomial(std::vector<double> alpha, std::size_t w) {
        return {w, Activation::Polynomial, 1.0, std::move(alpha)};
    }
    static LayerSpec identity(std::size_t w) { return {w, Activation::Identity, 1.0, {}}; }

    void validate() const {
        if (width == 0) throw ConfigError("layer: width must be >= 1");
        if (activation == Activation::Sine && !(omega0 > 0.0))
            throw ConfigError("layer: sine omega0 must be positive");
        if (activation == Activation::Polynomial) {
            if (poly.empty()) throw ConfigError("layer: polynomial needs coefficients");
            for (double a : poly)
                if (!std::isfinite(a)) throw ConfigError("layer: polynomial coefficients must be finite");
        }
    }
};

struct TensorDesc {
    std::string name;
    std::size_t offset = 0;
    std::size_t rows = 0;
    std::size_t cols = 1;
    std::size_t count() const { return rows * cols; }
};

// Flat parameter layout: mapping block first (when trainable), then per
// hidden layer weights (row-major) and biases, output layer last.
struct ParamLayout {
    std::vector<TensorDesc> tensors;
    std::size_t total = 0;

    const TensorDesc& find(const std::string& name) const {
        for (const auto& t : tensors)
            if (t.name == name) return t;
        throw ArgumentError("layout: no tensor named " + name);
    }
};

// The INR family: input mapping gamma followed by an MLP with a linear
// width-1 output. `theta` holds every trainable parameter; a frozen mapping
// keeps its block in `frozen_mapping` instead.
struct InrModel {
    MappingSpec mapping;
    std::vector<LayerSpec> hidden;
    std::vector<double> frozen_mapping;
    std::vector<double> theta;
    ParamLayout layout;

    std::size_t input_dim() const { return mapping.input_dim; }
    std::size_t param_count() const { return layout.total; }
    bool trainable_mapping() const { return mapping.trainable; }

    std::size_t layer_fan_in(std::size_t i) const {
        return i == 0 ? mapping.output_dim() : hidden[i - 1].width;
    }
    std::size_t output_fan_in() const {
        return hidden.empty() ? mapping.output_dim() : hidden.back().width;
    }
};

namespace detail {

template <class S>
S apply_activation(const LayerSpec& l, S x) {
    switch (l.activation) {
    case Activation::Relu: return value_of(x) > 0.0 ? x : S(0.0);
    case Activation::Sine: return sin(S(l.omega0) * x);
    case Activation::Polynomial: {
        S acc = S(l.poly.back());
        for (std::size_t k = l.poly.size() - 1; k-- > 0;) acc = acc * x + S(l.poly[k]);
        return acc;
    }
    case Activation::Identity: return x;
    }
    return S(0.0);
}

template <class S>
S activation_derivative(const LayerSpec& l, S x) {
    switch (l.activation) {
    case Activation::Relu:
        return value_of(x) > 0.0 ? S(1.0) : S(0.0); // subgradient 0 at the kink
    case Activation::Sine:
        return S(l.omega0) * cos(S(l.omega0) * x);
    case Activation::Polynomial: {
        const std::size_t k_max = l.poly.size() - 1;
        if (k_max == 0) return S(0.0);
        S acc = S(double(k_max) * l.poly[k_max]);
        for (std::size_t k = k_max - 1; k >= 1; --k) acc = acc * x + S(double(k) * l.poly[k]);
        return acc;
    }
    case Activation::Identity: return S(1.0);
    }
    return S(0.0);
}

inline double layer_init_bound(const LayerSpec& l, std::size_t fan_in) {
    double b = std::sqrt(6.0 / static_cast<double>(fan_in));
    if (l.activation == Activation::Sine) b /= l.omega0;
    return b;
}

} // namespace detail

namespace detail {

inline ParamLayout make_layout(const MappingSpec& mapping,
                               const std::vector<LayerSpec>& hidden) {
    ParamLayout layout;
    std::size_t off = 0;
    if (mapping.trainable) {
        layout.tensors.push_back({"mapping", off, mapping.param_count(), 1});
        off += mapping.param_count();
    }
    std::size_t fan_in = mapping.output_dim();
    for (std::size_t i = 0; i < hidden.size(); ++i) {
        layout.tensors.push_back({"layer" + std::to_string(i) + ".w", off, hidden[i].width, fan_in});
        off += hidden[i].width * fan_in;
        layout.tensors.push_back({"layer" + std::to_string(i) + ".b", off, hidden[i].width, 1});
        off += hidden[i].width;
        fan_in = hidden[i].width;
    }
    layout.tensors.push_back({"out.w", off, 1, fan_in});
    off += fan_in;
    layout.tensors.push_back({"out.b", off, 1, 1});
    off += 1;
    layout.total = off;
    return layout;
}

} // namespace detail

inline InrModel build_model(const MappingSpec& mapping, std::vector<LayerSpec> hidden,
                            SeededRng& rng) {
    mapping.validate();
    for (const auto& l : hidden) l.validate();

    InrModel m;
    m.mapping = mapping;
    m.hidden = std::move(hidden);
    m.layout = detail::make_layout(m.mapping, m.hidden);
    m.theta.assign(m.layout.total, 0.0);

    // mapping block
    std::vector<double> mp = mapping.initial_params(rng);
    if (mapping.trainable)
        std::copy(mp.begin(), mp.end(), m.theta.begin());
    else
        m.frozen_mapping = std::move(mp);

    // hidden layers: uniform weights, zero biases
    for (std::size_t i = 0; i < m.hidden.size(); ++i) {
        const auto& desc = m.layout.find("layer" + std::to_string(i) + ".w");
        const double bound = detail::layer_init_bound(m.hidden[i], desc.cols);
        for (std::size_t k = 0; k < desc.count(); ++k)
            m.theta[desc.offset + k] = rng.uniform(-bound, bound);
    }

    // output layer follows the init scale of the stage feeding it
    {
        const auto& desc = m.layout.find("out.w");
        double bound = std::sqrt(6.0 / static_cast<double>(desc.cols));
        if (!m.hidden.empty() && m.hidden.back().activation == Activation::Sine)
            bound /= m.hidden.back().omega0;
        else if (m.hidden.empty() && mapping.variant == MappingVariant::SirenFirst)
            bound /= mapping.omega0;
        for (std::size_t k = 0; k < desc.count(); ++k)
            m.theta[desc.offset + k] = rng.uniform(-bound, bound);
    }
    return m;
}

// Batched activations for one forward pass; reusing the cache across
// iterations keeps the training loop allocation-free.
template <class S>
struct ForwardCache {
    std::vector<S> map_params;
    std::vector<S> angles;              // n x gamma-width sin() arguments
    std::vector<S> gamma;               // n x gamma-width activations
    std::vector<std::vector<S>> pre;    // hidden pre-activations
    std::vector<std::vector<S>> post;   // hidden post-activations
    std::vector<S> out;                 // n
};

namespace detail {

template <class S>
void load_mapping_params(const InrModel& m, const S* theta, std::vector<S>& buf) {
    const std::size_t c = m.mapping.storage_count();
    buf.resize(c);
    if (m.mapping.trainable) {
        for (std::size_t i = 0; i < c; ++i) buf[i] = theta[i];
    } else {
        for (std::size_t i = 0; i < c; ++i) buf[i] = S(m.frozen_mapping[i]);
    }
}

// y = x * W^T + b for row-major W (w x fan_in), batched over n rows.
template <class S>
void linear_forward(const S* x, std::size_t n, std::size_t fan_in, const S* w, const S* b,
                    std::size_t width, S* y) {
    matmul_nt(x, n, fan_in, w, width, y);
    parallel_for(n, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i)
            for (std::size_t j = 0; j < width; ++j) y[i * width + j] += b[j];
    }, 1u << 14);
}

} // namespace detail

// Evaluates the network on a flat coordinate block (n x D, row-major).
template <class S>
void forward_batch(const InrModel& m, const S* theta, const std::vector<double>& coords,
                   ForwardCache<S>& cache) {
    const std::size_t d = m.input_dim();
    if (d == 0 || coords.size() % d != 0)
        throw ArgumentError("forward: coordinate block does not match input_dim");
    const std::size_t n = coords.size() / d;
    const std::size_t g = m.mapping.output_dim();

    detail::load_mapping_params(m, theta, cache.map_params);
    cache.angles.resize(n * g);
    cache.gamma.resize(n * g);
    parallel_for(n, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i)
            detail::mapping_forward_one(m.mapping, cache.map_params.data(), coords.data() + i * d,
                                        cache.angles.data() + i * g, cache.gamma.data() + i * g);
    }, 1u << 12);

    cache.pre.resize(m.hidden.size());
    cache.post.resize(m.hidden.size());
    const S* x = cache.gamma.data();
    std::size_t fan_in = g;
    for (std::size_t l = 0; l < m.hidden.size(); ++l) {
        const auto& spec = m.hidden[l];
        const auto& wd = m.layout.find("layer" + std::to_string(l) + ".w");
        const auto& bd = m.layout.find("layer" + std::to_string(l) + ".b");
        cache.pre[l].resize(n * spec.width);
        cache.post[l].resize(n * spec.width);
        detail::linear_forward(x, n, fan_in, theta + wd.offset, theta + bd.offset, spec.width,
                               cache.pre[l].data());
        S* pre = cache.pre[l].data();
        S* post = cache.post[l].data();
        parallel_for(n * spec.width, [&](std::size_t i0, std::size_t i1) {
            for (std::size_t i = i0; i < i1; ++i) post[i] = detail::apply_activation(spec, pre[i]);
        }, 1u << 14);
        x = post;
        fan_in = spec.width;
    }

    const auto& wd = m.layout.find("out.w");
    const auto& bd = m.layout.find("out.b");
    cache.out.resize(n);
    detail::linear_forward(x, n, fan_in, theta + wd.offset, theta + bd.offset, 1,
                           cache.out.data());
}

inline std::vector<double> forward(const InrModel& m, const std::vector<double>& coords) {
    ForwardCache<double> cache;
    forward_batch(m, m.theta.data(), coords, cache);
    return cache.out;
}

// Reverse pass from d(loss)/d(output); accumulates into d_theta (length
// param_count). Weight/bias gradients reduce over the batch in fixed order.
template <class S>
void backward_accumulate(const InrModel& m, const S* theta, const std::vector<double>& coords,
                         const ForwardCache<S>& cache, const std::vector<S>& d_out,
                         S* d_theta) {
    const std::size_t d = m.input_dim();
    const std::size_t n = coords.size() / d;
    const std::size_t g = m.mapping.output_dim();
    if (d_out.size() != n) throw ArgumentError("backward: d_out length mismatch");

    std::vector<S> d_post; // gradient w.r.t. the activations feeding the next stage
    // output layer
    {
        const auto& wd = m.layout.find("out.w");
        const auto& bd = m.layout.find("out.b");
        const std::size_t fan_in = m.output_fan_in();
        const S* x = m.hidden.empty() ? cache.gamma.data() : cache.post.back().data();
        matmul_tn_accumulate(d_out.data(), n, 1, x, fan_in, d_theta + wd.offset);
        S acc = S(0.0);
        for (std::size_t i = 0; i < n; ++i) acc += d_out[i];
        d_theta[bd.offset] += acc;
        d_post.resize(n * fan_in);
        matmul_nn(d_out.data(), n, 1, theta + wd.offset, fan_in, d_post.data());
    }

    std::vector<S> d_pre;
    for (std::size_t l = m.hidden.size(); l-- > 0;) {
        const auto& spec = m.hidden[l];
        const auto& wd = m.layout.find("layer" + std::to_string(l) + ".w");
        const auto& bd = m.layout.find("layer" + std::to_string(l) + ".b");
        const std::size_t width = spec.width;
        const std::size_t fan_in = m.layer_fan_in(l);
        const S* pre = cache.pre[l].data();

        d_pre.resize(n * width);
        S* dp = d_pre.data();
        const S* dz = d_post.data();
        parallel_for(n * width, [&](std::size_t i0, std::size_t i1) {
            for (std::size_t i = i0; i < i1; ++i)
                dp[i] = dz[i] * detail::activation_derivative(spec, pre[i]);
        }, 1u << 14);

        const S* x = (l == 0) ? cache.gamma.data() : cache.post[l - 1].data();
        matmul_tn_accumulate(d_pre.data(), n, width, x, fan_in, d_theta + wd.offset);
        for (std::size_t j = 0; j < width; ++j) {
            S acc = S(0.0);
            for (std::size_t i = 0; i < n; ++i) acc += d_pre[i * width + j];
            d_theta[bd.offset + j] += acc;
        }

        d_post.resize(n * fan_in);
        matmul_nn(d_pre.data(), n, width, theta + wd.offset, fan_in, d_post.data());
    }

    if (m.mapping.trainable) {
        // d(angle) = d(gamma) * cos(angle), then variant-specific chain
        std::vector<S> d_angle(n * g);
        const S* da_src = d_post.data();
        const S* ang = cache.angles.data();
        parallel_for(n * g, [&](std::size_t i0, std::size_t i1) {
            for (std::size_t i = i0; i < i1; ++i) d_angle[i] = da_src[i] * cos(ang[i]);
        }, 1u << 14);
        for (std::size_t i = 0; i < n; ++i)
            detail::mapping_backward_one(m.mapping, coords.data() + i * d,
                                         d_angle.data() + i * g, d_theta);
    }
}

// Per-coordinate parameter Jacobian: row i is the gradient of f(r_i) with
// respect to theta, laid out like theta itself.
inline void jacobian(const InrModel& m, const std::vector<double>& coords, Matrix& j) {
    const std::size_t d = m.input_dim();
    if (d == 0 || coords.size() % d != 0)
        throw ArgumentError("jacobian: coordinate block does not match input_dim");
    const std::size_t n = coords.size() / d;
    const std::size_t p = m.param_count();
    const std::size_t g = m.mapping.output_dim();

    ForwardCache<double> cache;
    forward_batch(m, m.theta.data(), coords, cache);
    j = Matrix(n, p);

    std::vector<double> d_post(n * m.output_fan_in());
    {
        const auto& wd = m.layout.find("out.w");
        const auto& bd = m.layout.find("out.b");
        const std::size_t fan_in = m.output_fan_in();
        const double* x = m.hidden.empty() ? cache.gamma.data() : cache.post.back().data();
        const double* w = m.theta.data() + wd.offset;
        parallel_for(n, [&](std::size_t i0, std::size_t i1) {
            for (std::size_t i = i0; i < i1; ++i) {
                double* row = j.row(i);
                for (std::size_t k = 0; k < fan_in; ++k) row[wd.offset + k] = x[i * fan_in + k];
                row[bd.offset] = 1.0;
                for (std::size_t k = 0; k < fan_in; ++k) d_post[i * fan_in + k] = w[k];
            }
        }, 1u << 12);
    }

    std::vector<double> d_pre;
    for (std::size_t l = m.hidden.size(); l-- > 0;) {
        const auto& spec = m.hidden[l];
        const auto& wd = m.layout.find("layer" + std::to_string(l) + ".w");
        const auto& bd = m.layout.find("layer" + std::to_string(l) + ".b");
        const std::size_t width = spec.width;
        const std::size_t fan_in = m.layer_fan_in(l);
        const double* pre = cache.pre[l].data();
        const double* x = (l == 0) ? cache.gamma.data() : cache.post[l - 1].data();

        d_pre.resize(n * width);
        parallel_for(n, [&](std::size_t i0, std::size_t i1) {
            for (std::size_t i = i0; i < i1; ++i) {
                double* row = j.row(i);
                for (std::size_t q = 0; q < width; ++q) {
                    double dp = d_post[i * width + q] *
                                detail::activation_derivative(spec, pre[i * width + q]);
                    d_pre[i * width + q] = dp;
                    row[bd.offset + q] = dp;
                    double* wrow = row + wd.offset + q * fan_in;
                    const double* xi = x + i * fan_in;
                    for (std::size_t k = 0; k < fan_in; ++k) wrow[k] = dp * xi[k];
                }
            }
        }, 1u << 10);

        d_post.resize(n * fan_in);
        matmul_nn(d_pre.data(), n, width, m.theta.data() + wd.offset, fan_in, d_post.data());
    }

    if (m.mapping.trainable) {
        const double* ang = cache.angles.data();
        parallel_for(n, [&](std::size_t i0, std::size_t i1) {
            std::vector<double> d_angle(g);
            for (std::size_t i = i0; i < i1; ++i) {
                for (std::size_t q = 0; q < g; ++q)
                    d_angle[q] = d_post[i * g + q] * std::cos(ang[i * g + q]);
                detail::mapping_backward_one(m.mapping, coords.data() + i * d, d_angle.data(),
                                             j.row(i));
            }
        }, 1u << 10);
    }
}

// Gradient of f at a single coordinate, laid out like theta.
inline std::vector<double> param_gradient(const InrModel& m, const std::vector<double>& coord) {
    if (coord.size() != m.input_dim())
        throw ArgumentError("param_gradient: coordinate dimension mismatch");
    Matrix j;
    jacobian(m, coord, j);
    return std::vector<double>(j.data.begin(), j.data.end());
}

// First-order prediction around the model's own theta:
// f(r; theta0) + (theta - theta0)^T grad f(r; theta0).
inline std::vector<double> linearized_predict(const InrModel& m, const std::vector<double>& theta,
                                              const std::vector<double>& coords) {
    if (theta.size() != m.param_count())
        throw ArgumentError("linearized_predict: theta layout mismatch");
    const std::size_t d = m.input_dim();
    const std::size_t n = coords.size() / d;
    std::vector<double> out = forward(m, coords);
    std::vector<double> delta(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) delta[i] = theta[i] - m.theta[i];

    const std::size_t block = std::max<std::size_t>(1, (1u << 22) / std::max<std::size_t>(1, m.param_count()));
    Matrix j;
    for (std::size_t b = 0; b < n; b += block) {
        const std::size_t e = std::min(n, b + block);
        std::vector<double> chunk(coords.begin() + b * d, coords.begin() + e * d);
        jacobian(m, chunk, j);
        for (std::size_t i = 0; i < e - b; ++i)
            out[b + i] += dot_strided(j.row(i), delta.data(), delta.size());
    }
    return out;
}

// 64-bit FNV-1a over the architecture and parameters; distinguishes models
// for Gram caching and export provenance.
inline std::uint64_t model_fingerprint(const InrModel& m) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix_bytes = [&h](const void* ptr, std::size_t len) {
        const unsigned char* b = static_cast<const unsigned char*>(ptr);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ull;
        }
    };
    auto mix_u64 = [&](std::uint64_t v) { mix_bytes(&v, sizeof v); };
    auto mix_d = [&](double v) { mix_bytes(&v, sizeof v); };

    mix_u64(static_cast<std::uint64_t>(m.mapping.variant));
    mix_u64(m.mapping.input_dim);
    mix_u64(m.mapping.trainable ? 1 : 0);
    mix_d(m.mapping.sigma);
    mix_u64(m.mapping.rows);
    mix_u64(m.mapping.levels);
    mix_d(m.mapping.f0);
    mix_d(m.mapping.omega0);
    mix_u64(m.mapping.width);
    for (const auto& l : m.hidden) {
        mix_u64(l.width);
        mix_u64(static_cast<std::uint64_t>(l.activation));
        mix_d(l.omega0);
        for (double a : l.poly) mix_d(a);
    }
    for (double v : m.frozen_mapping) mix_d(v);
    for (double v : m.theta) mix_d(v);
    return h;
}

} // namespace inrlab

#endif
