#ifndef INRLAB_META_HPP
#define INRLAB_META_HPP

#include <string>
#include <vector>

#include "inrlab/csv.hpp"
#include "inrlab/dataset.hpp"
#include "inrlab/dual.hpp"
#include "inrlab/errors.hpp"
#include "inrlab/model.hpp"
#include "inrlab/trainer.hpp"

namespace inrlab {

// Tasks drawn from one meta-distribution; every task shares the coordinate
// grid so adapted weights and NTK spectra are comparable.
struct TaskSet {
    std::vector<Dataset> tasks;
    std::string generator;

    void validate() const {
        if (tasks.empty()) throw ArgumentError("task set: empty");
        for (const auto& t : tasks) {
            t.validate();
            if (t.dim != tasks.front().dim || t.size() != tasks.front().size())
                throw ArgumentError("task set: tasks must share the coordinate grid");
        }
    }
};

struct MetaConfig {
    enum class Algorithm { Maml, Reptile };
    Algorithm algorithm = Algorithm::Maml;
    double inner_lr = 1e-2;
    long inner_steps = 2;
    double outer_lr = 1e-5;       // Adam lr for MAML, blend fraction for Reptile
    long outer_iterations = 500;
    std::size_t tasks_per_step = 8;
    std::uint64_t seed = 0;
    bool first_order = false;     // skip the curvature term (speed toggle)

    void validate() const {
        if (inner_lr < 0.0) throw ConfigError("meta: inner_lr must be >= 0");
        if (inner_steps < 0) throw ConfigError("meta: inner_steps must be >= 0");
        if (!(outer_lr > 0.0)) throw ConfigError("meta: outer_lr must be positive");
        if (outer_iterations < 0) throw ConfigError("meta: outer_iterations must be >= 0");
        if (tasks_per_step == 0) throw ConfigError("meta: tasks_per_step must be >= 1");
    }
};

struct MetaReport {
    std::vector<double> post_adaptation_mse; // mean over the sampled tasks, per outer step

    void write_csv(const std::string& path) const {
        CsvWriter csv(path, {"outer_iter", "mean_post_adaptation_mse"});
        for (std::size_t i = 0; i < post_adaptation_mse.size(); ++i)
            csv.row({double(i), post_adaptation_mse[i]});
    }
};

// Exact Hessian-vector product of the masked task MSE at theta: the reverse
// pass is replayed in dual arithmetic with the direction riding along.
inline std::vector<double> mse_hessian_vector(const InrModel& model,
                                              const std::vector<double>& theta,
                                              const std::vector<double>& direction,
                                              const Dataset& task) {
    const std::size_t p = model.param_count();
    if (theta.size() != p || direction.size() != p)
        throw ArgumentError("hessian_vector: layout mismatch");
    std::vector<Dual> theta_d(p);
    for (std::size_t i = 0; i < p; ++i) theta_d[i] = Dual(theta[i], direction[i]);
    ForwardCache<Dual> cache;
    std::vector<Dual> grad_d;
    detail::mse_gradient(model, theta_d.data(), task, cache, grad_d);
    std::vector<double> hv(p);
    for (std::size_t i = 0; i < p; ++i) hv[i] = grad_d[i].d;
    return hv;
}

// Gradient of the post-adaptation loss with respect to the pre-adaptation
// weights: run `inner_steps` of full-batch GD, then pull the loss gradient
// back through the trajectory, d theta_{k+1}/d theta_k = I - lr * H(theta_k).
// Also reports the post-adaptation loss itself.
inline std::pair<std::vector<double>, double> maml_task_gradient(
    const InrModel& model, const std::vector<double>& theta, const Dataset& task,
    double inner_lr, long inner_steps, bool first_order = false) {
    ForwardCache<double> cache;
    std::vector<double> grad;

    std::vector<std::vector<double>> trajectory;
    trajectory.reserve(std::size_t(inner_steps) + 1);
    trajectory.push_back(theta);
    for (long k = 0; k < inner_steps; ++k) {
        detail::mse_gradient(model, trajectory.back().data(), task, cache, grad);
        std::vector<double> next = trajectory.back();
        for (std::size_t i = 0; i < next.size(); ++i) next[i] -= inner_lr * grad[i];
        trajectory.push_back(std::move(next));
    }

    double post_loss = detail::mse_gradient(model, trajectory.back().data(), task, cache, grad);
    std::vector<double> g = grad;
    if (!first_order) {
        for (long k = inner_steps; k-- > 0;) {
            auto hv = mse_hessian_vector(model, trajectory[std::size_t(k)], g, task);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] -= inner_lr * hv[i];
        }
    }
    return {std::move(g), post_loss};
}

// Second-order MAML: per outer step, the meta-gradient is the mean of
// maml_task_gradient over the sampled tasks, applied with Adam(outer_lr).
// Task order and sampling come from the config seed alone.
inline std::pair<std::vector<double>, MetaReport> maml_train(const InrModel& model,
                                                             const TaskSet& tasks,
                                                             const MetaConfig& cfg) {
    cfg.validate();
    tasks.validate();
    if (tasks.tasks.front().dim != model.input_dim())
        throw ArgumentError("maml: task dimension does not match the model");

    std::vector<double> theta = model.theta;
    AdamState adam;
    OptimizerConfig outer = OptimizerConfig::adam(cfg.outer_lr, cfg.outer_iterations);
    SeededRng rng(cfg.seed);
    MetaReport report;

    std::vector<double> grad_acc(theta.size());
    for (long it = 0; it < cfg.outer_iterations; ++it) {
        std::vector<std::size_t> picks(cfg.tasks_per_step);
        for (auto& p : picks) p = rng.index(tasks.tasks.size());

        std::fill(grad_acc.begin(), grad_acc.end(), 0.0);
        double loss_acc = 0.0;
        for (std::size_t p : picks) {
            auto [g, loss] = maml_task_gradient(model, theta, tasks.tasks[p], cfg.inner_lr,
                                                cfg.inner_steps, cfg.first_order);
            for (std::size_t i = 0; i < grad_acc.size(); ++i) grad_acc[i] += g[i];
            loss_acc += loss;
        }
        const double inv = 1.0 / double(cfg.tasks_per_step);
        for (auto& v : grad_acc) v *= inv;
        loss_acc *= inv;
        if (!std::isfinite(loss_acc) || loss_acc > 1e6)
            throw DivergenceError("maml: post-adaptation loss diverged at outer step " +
                                      std::to_string(it),
                                  it);
        report.post_adaptation_mse.push_back(loss_acc);
        adam.step(theta, grad_acc, outer);
    }
    return {std::move(theta), std::move(report)};
}

// Reptile: adapt on one sampled task, then move the meta-weights an
// outer_lr fraction toward the adapted weights.
inline std::pair<std::vector<double>, MetaReport> reptile_train(const InrModel& model,
                                                                const TaskSet& tasks,
                                                                const MetaConfig& cfg) {
    cfg.validate();
    tasks.validate();
    if (tasks.tasks.front().dim != model.input_dim())
        throw ArgumentError("reptile: task dimension does not match the model");

    std::vector<double> theta = model.theta;
    SeededRng rng(cfg.seed);
    MetaReport report;
    ForwardCache<double> cache;
    std::vector<double> grad;

    for (long it = 0; it < cfg.outer_iterations; ++it) {
        const Dataset& task = tasks.tasks[rng.index(tasks.tasks.size())];
        std::vector<double> adapted = theta;
        for (long k = 0; k < cfg.inner_steps; ++k) {
            detail::mse_gradient(model, adapted.data(), task, cache, grad);
            for (std::size_t i = 0; i < adapted.size(); ++i) adapted[i] -= cfg.inner_lr * grad[i];
        }
        double post = detail::mse_gradient(model, adapted.data(), task, cache, grad);
        if (!std::isfinite(post) || post > 1e6)
            throw DivergenceError("reptile: adapted loss diverged at outer step " +
                                      std::to_string(it),
                                  it);
        report.post_adaptation_mse.push_back(post);
        for (std::size_t i = 0; i < theta.size(); ++i)
            theta[i] += cfg.outer_lr * (adapted[i] - theta[i]);
    }
    return {std::move(theta), std::move(report)};
}

// Plain Adam training on one task; the single-task baseline initialization.
inline std::vector<double> pretrain_single_task(const InrModel& model, const Dataset& task,
                                                long iterations, double lr = 1e-4) {
    SeededRng unused(0);
    auto [trained, report] = train_full_batch(model, task, OptimizerConfig::adam(lr, iterations),
                                              unused);
    return trained.theta;
}

struct FinetuneCurves {
    std::vector<double> mean_train_psnr; // per step, length steps + 1
    std::vector<double> mean_test_psnr;

    void write_csv(const std::string& path) const {
        CsvWriter csv(path, {"step", "mean_train_psnr", "mean_test_psnr"});
        for (std::size_t i = 0; i < mean_train_psnr.size(); ++i)
            csv.row({double(i), mean_train_psnr[i], mean_test_psnr[i]});
    }
};

// Fine-tunes `steps` iterations from the given initialization on every task
// and averages the per-step train/test PSNR curves over tasks.
inline FinetuneCurves finetune_eval(const std::vector<double>& init_theta, const InrModel& spec,
                                    const TaskSet& tasks, long steps,
                                    const OptimizerConfig& opt) {
    tasks.validate();
    if (init_theta.size() != spec.param_count())
        throw ArgumentError("finetune_eval: theta layout does not match the model");
    OptimizerConfig cfg = opt;
    cfg.iterations = steps;

    FinetuneCurves curves;
    curves.mean_train_psnr.assign(std::size_t(steps) + 1, 0.0);
    curves.mean_test_psnr.assign(std::size_t(steps) + 1, 0.0);

    SeededRng unused(0);
    InrModel m = spec;
    m.theta = init_theta;
    for (const auto& task : tasks.tasks) {
        auto [trained, report] = train_full_batch(m, task, cfg, unused);
        for (std::size_t s = 0; s < curves.mean_train_psnr.size(); ++s) {
            curves.mean_train_psnr[s] += report.train_psnr[s];
            curves.mean_test_psnr[s] += report.test_psnr[s];
        }
    }
    const double inv = 1.0 / double(tasks.tasks.size());
    for (auto& v : curves.mean_train_psnr) v *= inv;
    for (auto& v : curves.mean_test_psnr) v *= inv;
    return curves;
}

} // namespace inrlab

#endif
