#ifndef INRLAB_CLI_HPP
#define INRLAB_CLI_HPP

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "inrlab/experiments.hpp"

namespace inrlab {

namespace cli {

// train: fit a model to a dataset, write the weights and the trace.
inline void cmd_train(const json& c, RunDir& run) {
    const std::uint64_t seed = c.value("seed", 1);
    SeededRng rng(seed);
    InrModel model = cfg::model_from(c, rng);
    Dataset data = cfg::data_from(c, seed);
    OptimizerConfig opt = cfg::optimizer_from(c);
    auto [trained, report] = train_full_batch(model, data, opt, rng);
    save_model(trained, run.file("model.json"));
    run.record("model.json");
    report.write_csv(run.file("report.csv"));
    run.record("report.csv");
    if (data.grid_rows > 0) {
        auto recon = forward(trained, data.coords);
        save_pgm(detail::dataset_grid(data, recon), run.file("recon.pgm"));
        run.record("recon.pgm");
    }
}

// spectrum: DFT of a dataset's targets, or of a model evaluated on the
// dataset's coordinates when a model_file is given.
inline void cmd_spectrum(const json& c, RunDir& run) {
    const std::uint64_t seed = c.value("seed", 1);
    Dataset data = cfg::data_from(c, seed);
    std::vector<double> values = data.targets;
    if (c.contains("model_file")) {
        SeededRng rng(seed);
        InrModel model = cfg::model_from(c, rng);
        values = forward(model, data.coords);
    }
    if (data.grid_rows > 0) {
        auto spec = dft(detail::dataset_grid(data, values));
        detail::write_spectrum_csv_2d(spec, run.file("spectrum.csv"));
    } else {
        auto spec = dft(values);
        const double fs = c.value("data", json::object()).value("fs", double(values.size()));
        detail::write_spectrum_csv_1d(spec, fs, run.file("spectrum.csv"));
    }
    run.record("spectrum.csv");
}

// support: enumerate the reachable harmonic set of a frequency matrix.
inline void cmd_support(const json& c, RunDir& run) {
    auto rows = c.value("omega", std::vector<std::vector<double>>{{1.0}, {3.0}});
    if (rows.empty()) throw ConfigError("support: omega must have rows");
    Matrix omega(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != omega.cols) throw ConfigError("support: ragged omega");
        for (std::size_t j = 0; j < omega.cols; ++j) omega(i, j) = rows[i][j];
    }
    SupportBudget budget = SupportBudget::from_poly(c.value("degree", 3), c.value("layers", 3));
    auto support = harmonic_support(omega, budget, c.value("dedup_tol", 1e-9),
                                    c.value("lattice_cap", std::size_t{10000000}));
    std::vector<std::string> header;
    for (std::size_t d = 0; d < omega.cols; ++d) header.push_back("freq_" + std::to_string(d));
    CsvWriter csv(run.file("support.csv"), header);
    for (const auto& w : support) csv.row(w);
    run.record("support.csv");
}

// bessel-expand: harmonic atoms of a small SIREN via its Bessel series.
inline void cmd_bessel_expand(const json& c, RunDir& run) {
    const std::uint64_t seed = c.value("seed", 1);
    SeededRng rng(seed);
    InrModel model = cfg::model_from(c, rng);
    auto set = siren_bessel_expansion(model, c.value("truncation", 8));
    set.write_csv(run.file("atoms.csv"));
    run.record("atoms.csv");
}

// ntk: Gram spectrum and eigenfunction gallery at the model's weights.
inline void cmd_ntk(const json& c, RunDir& run) { expts::ntk_eigs_experiment(c, run); }

// energy: E(lambda) profile of one model against synthetic signals.
inline void cmd_energy(const json& c, RunDir& run) {
    const std::uint64_t seed = c.value("seed", 1);
    SeededRng rng(seed);
    json root = c;
    if (!root.contains("model") && !root.contains("model_file")) {
        const double omega0 = c.value("omega0", 30.0);
        root["model"] = {{"input_dim", 2},
                         {"mapping", {{"variant", "siren-first"}, {"omega0", omega0}, {"width", 64}}},
                         {"hidden", {{{"activation", "sine"}, {"omega0", omega0}, {"width", 64}}}}};
    }
    InrModel model = cfg::model_from(root, rng);
    const std::size_t grid = c.value("grid", 16);
    TaskSet tasks = gen_face_proxy_tasks(grid, c.value("images", 16),
                                         c.value("task_seed", seed + 101), 0.5,
                                         c.value("mask_seed", 1));
    std::vector<std::vector<double>> signals;
    for (const auto& t : tasks.tasks) signals.push_back(t.targets);

    auto gram = gram_matrix(model, tasks.tasks.front().coords);
    gram.grid_rows = grid;
    gram.grid_cols = grid;
    auto spec = ntk_eigs(gram);
    auto profile = energy_concentration(spec, signals,
                                        c.value("thresholds", detail::default_thresholds()));
    profile.write_csv(run.file("energy.csv"));
    run.record("energy.csv");
    spec.write_eigenvalues_csv(run.file("eigenvalues.csv"));
    run.record("eigenvalues.csv");
}

// meta: meta-learn an initialization on synthetic tasks.
inline void cmd_meta(const json& c, RunDir& run) {
    const std::uint64_t seed = c.value("seed", 1);
    SeededRng rng(seed);
    json root = c;
    if (!root.contains("model") && !root.contains("model_file")) {
        const double omega0 = c.value("omega0", 30.0);
        root["model"] = {{"input_dim", 2},
                         {"mapping", {{"variant", "siren-first"}, {"omega0", omega0}, {"width", 64}}},
                         {"hidden", {{{"activation", "sine"}, {"omega0", omega0}, {"width", 64}}}}};
    }
    InrModel model = cfg::model_from(root, rng);
    const std::size_t grid = c.value("grid", 16);
    TaskSet tasks = gen_face_proxy_tasks(grid, c.value("train_tasks", 64),
                                         c.value("task_seed", seed + 101), 0.5,
                                         c.value("mask_seed", 1));
    MetaConfig mc;
    mc.algorithm = c.value("algorithm", std::string("maml")) == "reptile"
                       ? MetaConfig::Algorithm::Reptile
                       : MetaConfig::Algorithm::Maml;
    mc.inner_lr = c.value("inner_lr", 1e-2);
    mc.inner_steps = c.value("inner_steps",
                             mc.algorithm == MetaConfig::Algorithm::Reptile ? 5 : 2);
    mc.outer_lr = c.value("outer_lr",
                          mc.algorithm == MetaConfig::Algorithm::Maml ? 1e-5 : 0.1);
    mc.outer_iterations = c.value("outer_iterations", 500);
    mc.tasks_per_step = c.value("tasks_per_step", 8);
    mc.seed = c.value("meta_seed", seed + 17);

    auto [theta, trace] = mc.algorithm == MetaConfig::Algorithm::Maml
                              ? maml_train(model, tasks, mc)
                              : reptile_train(model, tasks, mc);
    trace.write_csv(run.file("meta_trace.csv"));
    run.record("meta_trace.csv");
    InrModel meta_model = model;
    meta_model.theta = theta;
    save_model(meta_model, run.file("meta_model.json"));
    run.record("meta_model.json");
}

} // namespace cli

// Entry point shared by the binary and in-process tests. Exit codes:
// 0 success, 2 configuration/usage error, 3 numeric or divergence failure.
inline int cli_main(int argc, const char* const* argv) {
    CLI::App app{"inrlab: a desk-scale implicit-neural-representation laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir, expt_name;
    long long seed_override = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--seed", seed_override, "override the config seed");
    };

    CLI::App* sub_train = app.add_subcommand("train", "fit a model to a signal or image");
    CLI::App* sub_spectrum = app.add_subcommand("spectrum", "DFT of a dataset or reconstruction");
    CLI::App* sub_support = app.add_subcommand("support", "enumerate a harmonic support set");
    CLI::App* sub_bessel = app.add_subcommand("bessel-expand", "Bessel atoms of a small SIREN");
    CLI::App* sub_ntk = app.add_subcommand("ntk", "empirical NTK spectrum and eigenfunctions");
    CLI::App* sub_energy = app.add_subcommand("energy", "energy concentration profile");
    CLI::App* sub_meta = app.add_subcommand("meta", "meta-learn an initialization");
    CLI::App* sub_expt = app.add_subcommand("expt", "run a named experiment");
    sub_expt->add_option("name", expt_name,
                         "one of: imperfect-recovery aliasing energy-profile ntk-eigs "
                         "meta-vs-random single-task-baseline eigenfn-learnability support-check")
        ->required();
    for (CLI::App* sub : {sub_train, sub_spectrum, sub_support, sub_bessel, sub_ntk, sub_energy,
                          sub_meta, sub_expt})
        add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        json config = config_path.empty() ? json::object() : cfg::load_config_file(config_path);
        if (seed_override >= 0) config["seed"] = static_cast<std::uint64_t>(seed_override);

        if (sub_expt->parsed()) {
            run_experiment(expt_name, config, out_dir);
            return 0;
        }
        std::string name;
        void (*fn)(const json&, RunDir&) = nullptr;
        if (sub_train->parsed()) { name = "train"; fn = cli::cmd_train; }
        else if (sub_spectrum->parsed()) { name = "spectrum"; fn = cli::cmd_spectrum; }
        else if (sub_support->parsed()) { name = "support"; fn = cli::cmd_support; }
        else if (sub_bessel->parsed()) { name = "bessel-expand"; fn = cli::cmd_bessel_expand; }
        else if (sub_ntk->parsed()) { name = "ntk"; fn = cli::cmd_ntk; }
        else if (sub_energy->parsed()) { name = "energy"; fn = cli::cmd_energy; }
        else if (sub_meta->parsed()) { name = "meta"; fn = cli::cmd_meta; }
        else return 2;

        RunDir run(out_dir, name, config);
        fn(config, run);
        run.finalize();
        return 0;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    }
}

} // namespace inrlab

#endif
