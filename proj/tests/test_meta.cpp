#include <doctest.h>

#include <cmath>
#include <vector>

#include "inrlab/meta.hpp"

using namespace inrlab;

namespace {

// Single-coordinate task with target c: the masked MSE is (f(0) - c)^2.
Dataset point_task(double c) {
    Dataset d;
    d.dim = 1;
    d.coords = {0.0};
    d.targets = {c};
    d.train_mask = {1};
    return d;
}

// Constant-feature model: gamma(r) = sin(pi/2) = 1, so f(r) = w + b with
// exactly two parameters.
InrModel bias_only_model() {
    Matrix omega(1, 1);
    omega(0, 0) = 0.0;
    SeededRng rng(1);
    auto m = build_model(MappingSpec::explicit_map(omega, {std::numbers::pi / 2.0}), {}, rng);
    m.theta[0] = 0.0;
    m.theta[1] = 0.0;
    return m;
}

double rel_err(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-30);
}

} // namespace

TEST_CASE("hessian-vector product matches finite differences of the gradient") {
    SeededRng rng(2);
    auto m = build_model(MappingSpec::siren_first(3.0, 6, 1), {LayerSpec::sine(3.0, 6)}, rng);
    Dataset d;
    d.dim = 1;
    d.coords = signal_coords(16, 16.0);
    d.targets.resize(16);
    for (std::size_t i = 0; i < 16; ++i) d.targets[i] = std::sin(6.0 * d.coords[i]);
    d.train_mask.assign(16, 1);

    SeededRng vr(3);
    std::vector<double> v(m.param_count());
    for (auto& x : v) x = vr.normal(0.0, 1.0);

    auto hv = mse_hessian_vector(m, m.theta, v, d);

    const double h = 1e-6;
    ForwardCache<double> cache;
    std::vector<double> gp, gm;
    std::vector<double> tp = m.theta, tm = m.theta;
    for (std::size_t i = 0; i < v.size(); ++i) {
        tp[i] += h * v[i];
        tm[i] -= h * v[i];
    }
    detail::mse_gradient(m, tp.data(), d, cache, gp);
    detail::mse_gradient(m, tm.data(), d, cache, gm);
    std::vector<double> fd(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) fd[i] = (gp[i] - gm[i]) / (2.0 * h);

    CHECK(rel_err(hv, fd) <= 1e-5);
}

TEST_CASE("maml task gradient: closed form on the quadratic bias model") {
    // u = w + b, loss (u - c)^2, one GD step of rate eta:
    // meta-gradient = 2 (1 - 4 eta)^2 (u - c) * (1, 1)
    auto m = bias_only_model();
    const double eta = 0.1;
    for (double c : {1.0, -1.0}) {
        auto [g, loss] = maml_task_gradient(m, m.theta, point_task(c), eta, 1);
        double expect = 2.0 * std::pow(1.0 - 4.0 * eta, 2.0) * (0.0 - c);
        CHECK(g[0] == doctest::Approx(expect).epsilon(1e-12));
        CHECK(g[1] == doctest::Approx(expect).epsilon(1e-12));
        CHECK(loss == doctest::Approx(std::pow(1.0 - 4.0 * eta, 2.0) * c * c).epsilon(1e-12));
    }
}

TEST_CASE("maml task gradient: matches finite differences on a 10-parameter model") {
    SeededRng rng(5);
    auto m = build_model(MappingSpec::siren_first(2.0, 3, 1), {}, rng);
    REQUIRE(m.param_count() == 10);

    Dataset d;
    d.dim = 1;
    d.coords = signal_coords(8, 8.0);
    d.targets = {0.1, 0.7, 0.3, -0.2, 0.5, 0.9, -0.4, 0.0};
    d.train_mask.assign(8, 1);

    const double eta = 0.05;
    const long steps = 3;
    auto [g, loss] = maml_task_gradient(m, m.theta, d, eta, steps);

    // oracle: central differences of the post-adaptation loss
    ForwardCache<double> cache;
    std::vector<double> grad;
    auto post_loss_at = [&](std::vector<double> theta) {
        for (long k = 0; k < steps; ++k) {
            detail::mse_gradient(m, theta.data(), d, cache, grad);
            for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= eta * grad[i];
        }
        return detail::mse_gradient(m, theta.data(), d, cache, grad);
    };
    const double h = 1e-5;
    std::vector<double> fd(10);
    for (std::size_t i = 0; i < 10; ++i) {
        auto tp = m.theta, tm = m.theta;
        tp[i] += h;
        tm[i] -= h;
        fd[i] = (post_loss_at(tp) - post_loss_at(tm)) / (2.0 * h);
    }
    CHECK(rel_err(g, fd) <= 1e-4);

    // the first-order toggle drops the curvature term and must differ here
    auto [g1, l1] = maml_task_gradient(m, m.theta, d, eta, steps, true);
    CHECK(rel_err(g1, fd) > 1e-4);
}

TEST_CASE("maml with inner_lr = 0 equals averaged plain training bitwise") {
    SeededRng rng(6);
    auto model = build_model(MappingSpec::siren_first(4.0, 6, 1), {LayerSpec::sine(4.0, 6)}, rng);

    TaskSet tasks;
    for (int t = 0; t < 5; ++t) {
        Dataset d;
        d.dim = 1;
        d.coords = signal_coords(12, 12.0);
        d.targets.resize(12);
        for (std::size_t i = 0; i < 12; ++i)
            d.targets[i] = 0.5 + 0.3 * std::sin(2.0 * double(t + 1) * d.coords[i]);
        d.train_mask.assign(12, 1);
        tasks.tasks.push_back(std::move(d));
    }

    MetaConfig cfg;
    cfg.inner_lr = 0.0;
    cfg.inner_steps = 2;
    cfg.outer_lr = 1e-3;
    cfg.outer_iterations = 25;
    cfg.tasks_per_step = 3;
    cfg.seed = 99;

    auto [meta_theta, report] = maml_train(model, tasks, cfg);

    // baseline: Adam on the mean task gradient with the same sampling stream
    std::vector<double> theta = model.theta;
    AdamState adam;
    OptimizerConfig outer = OptimizerConfig::adam(cfg.outer_lr, cfg.outer_iterations);
    SeededRng sampler(cfg.seed);
    ForwardCache<double> cache;
    std::vector<double> grad, acc(theta.size());
    for (long it = 0; it < cfg.outer_iterations; ++it) {
        std::vector<std::size_t> picks(cfg.tasks_per_step);
        for (auto& p : picks) p = sampler.index(tasks.tasks.size());
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t p : picks) {
            detail::mse_gradient(model, theta.data(), tasks.tasks[p], cache, grad);
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += grad[i];
        }
        const double inv = 1.0 / double(cfg.tasks_per_step);
        for (auto& v : acc) v *= inv;
        adam.step(theta, acc, outer);
    }

    REQUIRE(meta_theta.size() == theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) CHECK(meta_theta[i] == theta[i]);

    // inner_steps = 0 collapses to the same degenerate equivalence
    MetaConfig cfg0 = cfg;
    cfg0.inner_lr = 0.37;
    cfg0.inner_steps = 0;
    auto [meta0, rep0] = maml_train(model, tasks, cfg0);
    for (std::size_t i = 0; i < theta.size(); ++i) CHECK(meta0[i] == theta[i]);
}

TEST_CASE("reptile with outer_lr = 1 on one task reduces to plain GD") {
    SeededRng rng(7);
    auto model = build_model(MappingSpec::siren_first(4.0, 5, 1), {}, rng);

    TaskSet tasks;
    {
        Dataset d;
        d.dim = 1;
        d.coords = signal_coords(10, 10.0);
        d.targets.resize(10);
        for (std::size_t i = 0; i < 10; ++i) d.targets[i] = std::sin(4.0 * d.coords[i]);
        d.train_mask.assign(10, 1);
        tasks.tasks.push_back(std::move(d));
    }

    MetaConfig cfg;
    cfg.algorithm = MetaConfig::Algorithm::Reptile;
    cfg.inner_lr = 0.01;
    cfg.inner_steps = 4;
    cfg.outer_lr = 1.0;
    cfg.outer_iterations = 5;
    cfg.seed = 1;
    auto [theta, report] = reptile_train(model, tasks, cfg);

    // plain GD for 20 steps
    std::vector<double> ref = model.theta;
    ForwardCache<double> cache;
    std::vector<double> grad;
    for (int k = 0; k < 20; ++k) {
        detail::mse_gradient(model, ref.data(), tasks.tasks[0], cache, grad);
        for (std::size_t i = 0; i < ref.size(); ++i) ref[i] -= cfg.inner_lr * grad[i];
    }
    for (std::size_t i = 0; i < ref.size(); ++i)
        CHECK(std::fabs(theta[i] - ref[i]) <= 1e-12);

    // zero inner steps leave the meta weights untouched
    MetaConfig cfg0 = cfg;
    cfg0.inner_steps = 0;
    auto [same, rep0] = reptile_train(model, tasks, cfg0);
    for (std::size_t i = 0; i < same.size(); ++i) CHECK(same[i] == model.theta[i]);
}

TEST_CASE("reptile on symmetric quadratic tasks contracts toward zero") {
    auto m = bias_only_model();
    TaskSet tasks;
    tasks.tasks.push_back(point_task(1.0));
    tasks.tasks.push_back(point_task(-1.0));

    MetaConfig cfg;
    cfg.algorithm = MetaConfig::Algorithm::Reptile;
    cfg.inner_lr = 0.1;
    cfg.inner_steps = 3;
    cfg.outer_lr = 0.005;
    cfg.outer_iterations = 200;
    cfg.seed = 12;
    auto [theta, report] = reptile_train(m, tasks, cfg);

    // scalar oracle: u' = (1-4*eta)^S u + (1-(1-4*eta)^S) c, then the outer blend
    SeededRng sampler(cfg.seed);
    double u = 0.0;
    const double shrink = std::pow(1.0 - 4.0 * cfg.inner_lr, double(cfg.inner_steps));
    for (long it = 0; it < cfg.outer_iterations; ++it) {
        double c = sampler.index(2) == 0 ? 1.0 : -1.0;
        double adapted = shrink * u + (1.0 - shrink) * c;
        u += cfg.outer_lr * (adapted - u);
    }
    CHECK(std::fabs((theta[0] + theta[1]) - u) <= 1e-9);
    CHECK(std::fabs(theta[0] + theta[1]) <= 0.05);
}

TEST_CASE("pretrain_single_task: zero iterations keep theta, reruns are identical") {
    SeededRng rng(8);
    auto model = build_model(MappingSpec::siren_first(4.0, 6, 1), {LayerSpec::sine(4.0, 6)}, rng);
    Dataset d;
    d.dim = 1;
    d.coords = signal_coords(12, 12.0);
    d.targets.assign(12, 0.25);
    d.train_mask.assign(12, 1);

    auto same = pretrain_single_task(model, d, 0);
    for (std::size_t i = 0; i < same.size(); ++i) CHECK(same[i] == model.theta[i]);

    auto a = pretrain_single_task(model, d, 30);
    auto b = pretrain_single_task(model, d, 30);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("finetune_eval: zero steps report the initialization PSNR") {
    SeededRng rng(9);
    auto model = build_model(MappingSpec::siren_first(6.0, 10, 1), {LayerSpec::sine(6.0, 10)},
                             rng);
    TaskSet tasks;
    for (int t = 0; t < 3; ++t) {
        Dataset d;
        d.dim = 1;
        d.coords = signal_coords(16, 16.0);
        d.targets.resize(16);
        for (std::size_t i = 0; i < 16; ++i)
            d.targets[i] = 0.5 + 0.2 * std::sin(2.0 * double(t + 1) * d.coords[i]);
        d.train_mask = make_split_mask(16, 0.5, 7);
        tasks.tasks.push_back(std::move(d));
    }

    auto curves = finetune_eval(model.theta, model, tasks, 0, OptimizerConfig::adam(1e-4, 0));
    REQUIRE(curves.mean_train_psnr.size() == 1);

    double mean = 0.0;
    for (const auto& task : tasks.tasks) {
        auto pred = forward(model, task.coords);
        mean += psnr_from_mse(mse_loss(pred, task.targets, task.train_mask));
    }
    mean /= 3.0;
    CHECK(curves.mean_train_psnr[0] == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("finetune_eval: a converged initialization starts above 30 dB on its own task") {
    SeededRng rng(10);
    auto model = build_model(MappingSpec::siren_first(10.0, 24, 1),
                             {LayerSpec::sine(10.0, 24)}, rng);
    Dataset d;
    d.dim = 1;
    d.coords = signal_coords(32, 32.0);
    d.targets.resize(32);
    for (std::size_t i = 0; i < 32; ++i)
        d.targets[i] = 0.5 + 0.3 * std::sin(2.0 * std::numbers::pi * d.coords[i]);
    d.train_mask.assign(32, 1);

    auto theta = pretrain_single_task(model, d, 1500, 1e-3);
    TaskSet tasks;
    tasks.tasks.push_back(d);
    auto curves = finetune_eval(theta, model, tasks, 0, OptimizerConfig::gd(1e-2, 0));
    CHECK(curves.mean_train_psnr[0] >= 30.0);
}

TEST_CASE("meta config validation") {
    MetaConfig cfg;
    cfg.inner_lr = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = MetaConfig{};
    cfg.outer_lr = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = MetaConfig{};
    cfg.tasks_per_step = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("maml and reptile are deterministic under a fixed seed") {
    SeededRng rng(30);
    auto model = build_model(MappingSpec::siren_first(4.0, 5, 1), {}, rng);
    TaskSet tasks;
    for (int t = 0; t < 3; ++t) {
        Dataset d;
        d.dim = 1;
        d.coords = signal_coords(8, 8.0);
        d.targets.assign(8, 0.2 * double(t + 1));
        d.train_mask.assign(8, 1);
        tasks.tasks.push_back(std::move(d));
    }
    MetaConfig cfg;
    cfg.inner_lr = 1e-2;
    cfg.inner_steps = 2;
    cfg.outer_lr = 1e-3;
    cfg.outer_iterations = 10;
    cfg.tasks_per_step = 2;
    cfg.seed = 5;
    auto [a, ra] = maml_train(model, tasks, cfg);
    auto [b, rb] = maml_train(model, tasks, cfg);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    cfg.algorithm = MetaConfig::Algorithm::Reptile;
    cfg.outer_lr = 0.1;
    auto [c, rc] = reptile_train(model, tasks, cfg);
    auto [d2, rd] = reptile_train(model, tasks, cfg);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == d2[i]);
}
