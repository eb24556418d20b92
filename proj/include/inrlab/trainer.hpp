#ifndef INRLAB_TRAINER_HPP
#define INRLAB_TRAINER_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "inrlab/csv.hpp"
#include "inrlab/dataset.hpp"
#include "inrlab/errors.hpp"
#include "inrlab/model.hpp"

namespace inrlab {

struct OptimizerConfig {
    enum class Kind { Adam, Gd };
    Kind kind = Kind::Adam;
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long iterations = 0;

    // Protocol defaults: Adam(1e-4) for random inits, GD(1e-2) for
    // meta-learned inits.
    static OptimizerConfig adam(double lr, long iterations, double beta1 = 0.9,
                                double beta2 = 0.999, double eps = 1e-8) {
        return {Kind::Adam, lr, beta1, beta2, eps, iterations};
    }
    static OptimizerConfig gd(double lr, long iterations) {
        return {Kind::Gd, lr, 0.0, 0.0, 0.0, iterations};
    }

    void validate() const {
        if (!(lr > 0.0)) throw ConfigError("optimizer: lr must be positive");
        if (iterations < 0) throw ConfigError("optimizer: iterations must be >= 0");
        if (kind == Kind::Adam) {
            if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
                throw ConfigError("optimizer: betas must lie in [0, 1)");
            if (!(eps > 0.0)) throw ConfigError("optimizer: eps must be positive");
        }
    }
};

// Standard bias-corrected Adam; state lives here so trainers, meta loops
// and tests share one implementation.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long t = 0;

    void step(std::vector<double>& theta, const std::vector<double>& grad,
              const OptimizerConfig& cfg) {
        if (m.empty()) {
            m.assign(theta.size(), 0.0);
            v.assign(theta.size(), 0.0);
        }
        ++t;
        const double c1 = 1.0 - std::pow(cfg.beta1, double(t));
        const double c2 = 1.0 - std::pow(cfg.beta2, double(t));
        for (std::size_t i = 0; i < theta.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
            theta[i] -= cfg.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.eps);
        }
    }
};

inline void gd_step(std::vector<double>& theta, const std::vector<double>& grad, double lr) {
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= lr * grad[i];
}

// Mean squared error over the masked elements.
inline double mse_loss(const std::vector<double>& pred, const std::vector<double>& target,
                       const std::vector<std::uint8_t>& mask) {
    if (pred.size() != target.size() || pred.size() != mask.size())
        throw ArgumentError("mse_loss: length mismatch");
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!mask[i]) continue;
        double d = pred[i] - target[i];
        s += d * d;
        ++n;
    }
    if (n == 0) throw ArgumentError("mse_loss: mask selects no elements");
    return s / double(n);
}

inline double psnr_from_mse(double mse, double peak = 1.0) {
    if (peak < 0.0) throw ArgumentError("psnr: peak must be nonnegative");
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

// 10*log10(peak^2 / MSE); +inf when the reconstruction is exact.
inline double psnr(const std::vector<double>& pred, const std::vector<double>& target,
                   double peak = 1.0) {
    if (peak < 0.0) throw ArgumentError("psnr: peak must be nonnegative");
    if (pred.size() != target.size() || pred.empty())
        throw ArgumentError("psnr: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double d = pred[i] - target[i];
        s += d * d;
    }
    return psnr_from_mse(s / double(pred.size()), peak);
}

struct TrainReport {
    std::vector<double> train_mse;   // length iterations + 1, index 0 = init
    std::vector<double> train_psnr;
    std::vector<double> test_psnr;   // NaN when the test mask is empty
    std::vector<double> final_theta;

    void write_csv(const std::string& path) const {
        CsvWriter csv(path, {"iter", "train_mse", "train_psnr", "test_psnr"});
        for (std::size_t i = 0; i < train_mse.size(); ++i)
            csv.row({double(i), train_mse[i], train_psnr[i], test_psnr[i]});
    }
};

namespace detail {

// Forward + masked-MSE reverse pass in one go; works for double and Dual so
// the meta loop can reuse it for Hessian-vector products. Returns the loss
// and fills grad (assigned, not accumulated).
template <class S>
S mse_gradient(const InrModel& m, const S* theta, const Dataset& data, ForwardCache<S>& cache,
               std::vector<S>& grad) {
    forward_batch(m, theta, data.coords, cache);
    const std::size_t n = data.size();
    const double inv = 1.0 / double(data.train_count());

    std::vector<S> d_out(n);
    S loss = S(0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (data.train_mask[i]) {
            S r = cache.out[i] - S(data.targets[i]);
            loss += r * r * S(inv);
            d_out[i] = S(2.0 * inv) * r;
        } else {
            d_out[i] = S(0.0);
        }
    }
    grad.assign(m.param_count(), S(0.0));
    backward_accumulate(m, theta, data.coords, cache, d_out, grad.data());
    return loss;
}

inline double masked_mse(const std::vector<double>& pred, const Dataset& data, bool train) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if ((data.train_mask[i] != 0) != train) continue;
        double d = pred[i] - data.targets[i];
        s += d * d;
        ++n;
    }
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    return s / double(n);
}

} // namespace detail

// Full-batch optimization of the masked MSE. Traces are recorded before
// every step and once after the last, so their length is iterations + 1.
// Divergence (loss above 1e6 or non-finite) aborts with the iteration index.
inline std::pair<InrModel, TrainReport> train_full_batch(const InrModel& model,
                                                         const Dataset& data,
                                                         const OptimizerConfig& opt,
                                                         SeededRng& rng) {
    (void)rng; // full-batch protocol draws nothing; the seed only fixes init/masks
    opt.validate();
    data.validate();
    if (data.dim != model.input_dim())
        throw ArgumentError("train: dataset dimension does not match the model");

    InrModel m = model;
    TrainReport report;
    AdamState adam;
    ForwardCache<double> cache;
    std::vector<double> grad;

    for (long it = 0; it <= opt.iterations; ++it) {
        double loss = detail::mse_gradient(m, m.theta.data(), data, cache, grad);
        std::vector<double> pred(cache.out.begin(), cache.out.end());
        double test_mse = detail::masked_mse(pred, data, false);
        report.train_mse.push_back(loss);
        report.train_psnr.push_back(psnr_from_mse(loss));
        report.test_psnr.push_back(std::isnan(test_mse)
                                       ? std::numeric_limits<double>::quiet_NaN()
                                       : psnr_from_mse(test_mse));
        if (!std::isfinite(loss) || loss > 1e6)
            throw DivergenceError("train: loss diverged (" + format_double(loss) +
                                      ") at iteration " + std::to_string(it),
                                  it);
        if (it == opt.iterations) break;
        if (opt.kind == OptimizerConfig::Kind::Adam)
            adam.step(m.theta, grad, opt);
        else
            gd_step(m.theta, grad, opt.lr);
    }
    report.final_theta = m.theta;
    return {std::move(m), std::move(report)};
}

// Central-difference gradient of the masked MSE; the independent oracle for
// the reverse-mode path.
inline std::vector<double> finite_diff_gradient(const InrModel& model, const Dataset& data,
                                                double h) {
    if (!(h > 0.0)) throw ArgumentError("finite_diff_gradient: h must be positive");
    data.validate();
    InrModel m = model;
    std::vector<double> g(m.param_count());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double save = m.theta[i];
        m.theta[i] = save + h;
        double up = mse_loss(forward(m, data.coords), data.targets, data.train_mask);
        m.theta[i] = save - h;
        double dn = mse_loss(forward(m, data.coords), data.targets, data.train_mask);
        m.theta[i] = save;
        g[i] = (up - dn) / (2.0 * h);
    }
    return g;
}

} // namespace inrlab

#endif
