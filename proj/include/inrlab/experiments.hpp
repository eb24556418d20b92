#ifndef INRLAB_EXPERIMENTS_HPP
#define INRLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "inrlab/csv.hpp"
#include "inrlab/datagen.hpp"
#include "inrlab/dataset.hpp"
#include "inrlab/errors.hpp"
#include "inrlab/harmonics.hpp"
#include "inrlab/meta.hpp"
#include "inrlab/model_io.hpp"
#include "inrlab/ntk.hpp"
#include "inrlab/pgm.hpp"
#include "inrlab/trainer.hpp"

namespace inrlab {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Run directory: every artifact is recorded with its producer and the run is
// sealed by a manifest. Identical configs reproduce identical bytes.
// ---------------------------------------------------------------------------

class RunDir {
public:
    RunDir(std::string path, std::string command, const json& config)
        : path_(std::move(path)), command_(std::move(command)) {
        std::filesystem::create_directories(path_);
        snapshot_ = config.dump(2);
        snapshot_ += '\n';
        config_hash_ = hash_hex(snapshot_);
        write_text("config.json", snapshot_);
    }

    const std::string& path() const { return path_; }
    const std::string& config_hash() const { return config_hash_; }

    std::string file(const std::string& name) const { return path_ + "/" + name; }

    void record(const std::string& name) { artifacts_.push_back(name); }

    void write_text(const std::string& name, const std::string& text) {
        std::ofstream out(file(name), std::ios::binary);
        if (!out) throw IoError("run dir: cannot write " + file(name));
        out << text;
        record(name);
    }

    // called once, after every artifact landed
    void finalize() {
        json m;
        m["command"] = command_;
        m["config_hash"] = config_hash_;
        json arts = json::array();
        for (const auto& a : artifacts_) {
            json e;
            e["file"] = a;
            e["producer"] = command_;
            arts.push_back(e);
        }
        m["artifacts"] = arts;
        std::ofstream out(file("manifest.json"), std::ios::binary);
        if (!out) throw IoError("run dir: cannot write manifest");
        out << m.dump(2) << "\n";
    }

    static std::string hash_hex(const std::string& s) {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

private:
    std::string path_;
    std::string command_;
    std::string snapshot_;
    std::string config_hash_;
    std::vector<std::string> artifacts_;
};

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace cfg {

inline json load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline MappingSpec mapping_from(const json& jm, std::size_t input_dim) {
    const std::string variant = jm.value("variant", "siren-first");
    MappingSpec spec;
    if (variant == "fourier-random") {
        spec = MappingSpec::fourier_random(jm.value("sigma", 10.0), jm.value("rows", 128),
                                           input_dim, jm.value("trainable", false));
    } else if (variant == "fourier-deterministic") {
        spec = MappingSpec::fourier_deterministic(jm.value("levels", 6), input_dim);
        spec.trainable = jm.value("trainable", false);
    } else if (variant == "single-frequency") {
        spec = MappingSpec::single_frequency(jm.value("f0", 1.0), input_dim,
                                             jm.value("trainable", false));
    } else if (variant == "siren-first") {
        spec = MappingSpec::siren_first(jm.value("omega0", 30.0), jm.value("width", 64),
                                        input_dim, jm.value("trainable", true));
    } else if (variant == "explicit") {
        auto rows = jm.at("omega").get<std::vector<std::vector<double>>>();
        if (rows.empty()) throw ConfigError("config: explicit mapping needs omega rows");
        Matrix omega(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != omega.cols)
                throw ConfigError("config: ragged omega matrix");
            for (std::size_t j = 0; j < omega.cols; ++j) omega(i, j) = rows[i][j];
        }
        std::vector<double> phase = jm.value("phase", std::vector<double>(rows.size(), 0.0));
        spec = MappingSpec::explicit_map(std::move(omega), std::move(phase),
                                         jm.value("trainable", false));
    } else {
        throw ConfigError("config: unknown mapping variant '" + variant + "'");
    }
    return spec;
}

inline std::vector<LayerSpec> hidden_from(const json& jl) {
    std::vector<LayerSpec> layers;
    for (const auto& l : jl) {
        const std::string act = l.value("activation", "relu");
        const std::size_t width = l.value("width", 64);
        if (act == "relu")
            layers.push_back(LayerSpec::relu(width));
        else if (act == "sine")
            layers.push_back(LayerSpec::sine(l.value("omega0", 30.0), width));
        else if (act == "polynomial")
            layers.push_back(LayerSpec::polynomial(l.at("poly").get<std::vector<double>>(), width));
        else if (act == "identity")
            layers.push_back(LayerSpec::identity(width));
        else
            throw ConfigError("config: unknown activation '" + act + "'");
    }
    return layers;
}

// Builds the model described under cfg["model"]; when a "model_file" is
// given it is loaded instead (init seed ignored).
inline InrModel model_from(const json& root, SeededRng& rng) {
    if (root.contains("model_file")) {
        const std::string path = root.at("model_file").get<std::string>();
        if (!std::filesystem::exists(path))
            throw ConfigError("config: model_file does not exist: " + path);
        return load_model(path);
    }
    json jm = root.value("model", json::object());
    const std::size_t input_dim = jm.value("input_dim", 2);
    MappingSpec mapping = mapping_from(jm.value("mapping", json::object()), input_dim);
    std::vector<LayerSpec> hidden;
    if (jm.contains("hidden"))
        hidden = hidden_from(jm.at("hidden"));
    else
        hidden = {LayerSpec::sine(mapping.omega0, mapping.width ? mapping.width : 64)};
    try {
        return build_model(mapping, std::move(hidden), rng);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline Dataset data_from(const json& root, std::uint64_t seed) {
    json jd = root.value("data", json::object());
    const std::string kind = jd.value("kind", "test-image");
    const double train_fraction = root.value("train_fraction", 1.0);
    const std::uint64_t mask_seed = root.value("mask_seed", 1);
    if (kind == "test-image")
        return gen_test_image(jd.value("size", 64), jd.value("seed", seed), train_fraction,
                              mask_seed);
    if (kind == "signal")
        return gen_signal(jd.value("f", 23.0), jd.value("fs", 128.0), jd.value("n", 128));
    if (kind == "pgm") {
        const std::string path = jd.at("path").get<std::string>();
        if (!std::filesystem::exists(path))
            throw ConfigError("config: pgm path does not exist: " + path);
        Dataset d = load_pgm(path);
        d.train_mask = make_split_mask(d.size(), train_fraction, mask_seed);
        return d;
    }
    throw ConfigError("config: unknown data kind '" + kind + "'");
}

inline OptimizerConfig optimizer_from(const json& root, const std::string& key = "optimizer") {
    json jo = root.value(key, json::object());
    const std::string variant = jo.value("variant", "adam");
    long iters = jo.value("iterations", 2000);
    if (variant == "adam")
        return OptimizerConfig::adam(jo.value("lr", 1e-4), iters, jo.value("beta1", 0.9),
                                     jo.value("beta2", 0.999), jo.value("eps", 1e-8));
    if (variant == "gd") return OptimizerConfig::gd(jo.value("lr", 1e-2), iters);
    throw ConfigError("config: unknown optimizer '" + variant + "'");
}

} // namespace cfg

// ---------------------------------------------------------------------------
// CSV helpers shared by subcommands and experiments
// ---------------------------------------------------------------------------

namespace detail {

inline void write_spectrum_csv_1d(const ComplexSpectrum& spec, double fs, const std::string& path) {
    CsvWriter csv(path, {"bin", "freq_hz", "magnitude"});
    const std::size_t n = spec.size();
    for (std::size_t k = 0; k < n; ++k)
        csv.row({double(k), double(k) * fs / double(n), spec.magnitude(k)});
}

inline void write_spectrum_csv_2d(const ComplexSpectrum& spec, const std::string& path) {
    CsvWriter csv(path, {"kx", "ky", "magnitude"});
    for (std::size_t r = 0; r < spec.rows; ++r)
        for (std::size_t c = 0; c < spec.cols; ++c)
            csv.row({double(c), double(r), spec.magnitude(r * spec.cols + c)});
}

inline Matrix dataset_grid(const Dataset& d, const std::vector<double>& values) {
    if (d.grid_rows * d.grid_cols != values.size())
        throw ArgumentError("dataset_grid: not an image dataset");
    Matrix m(d.grid_rows, d.grid_cols);
    m.data = values;
    return m;
}

// fraction of non-DC spectral energy on (even, even) bins
inline std::pair<double, double> even_odd_energy(const ComplexSpectrum& spec) {
    double even = 0.0, total = 0.0;
    for (std::size_t r = 0; r < spec.rows; ++r)
        for (std::size_t c = 0; c < spec.cols; ++c) {
            if (r == 0 && c == 0) continue;
            double p = spec.power(r * spec.cols + c);
            total += p;
            if (r % 2 == 0 && c % 2 == 0) even += p;
        }
    if (total == 0.0) return {0.0, 0.0};
    return {even / total, 1.0 - even / total};
}

inline std::vector<double> default_thresholds() {
    return {1.0, 3e-1, 1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 1e-6, 1e-7, 1e-8};
}

// normalized eigenvector as a [0,1] training target
inline std::vector<double> eigenfunction_target(const NtkSpectrum& spec, std::size_t index) {
    auto v = spec.eig.eigenvector(index);
    detail::min_max_normalize(v);
    return v;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

namespace expts {

// Imperfect recovery: train an FFN whose mapping covers only
// part of the spectrum, then inspect the reconstruction's DFT parity.
inline void imperfect_recovery(const json& c, RunDir& run) {
    const std::uint64_t seed = c.value("seed", 1);
    SeededRng rng(seed);

    json model_cfg = c.value("model", json::object());
    if (!model_cfg.contains("mapping")) {
        model_cfg["mapping"] = {{"variant", "single-frequency"},
                                {"f0", c.value("f0", 1.0)},
                                {"trainable", c.value("trainable_mapping", false)}};
        model_cfg["input_dim"] = 2;
        model_cfg["hidden"] = {{{"activation", "relu"}, {"width", 128}},
                               {{"activation", "relu"}, {"width", 128}}};
    }
    json root = c;
    root["model"] = model_cfg;

    InrModel model = cfg::model_from(root, rng);
    Dataset data = cfg::data_from(root, seed);
    OptimizerConfig opt = cfg::optimizer_from(root);

    auto [trained, report] = train_full_batch(model, data, opt, rng);
    report.write_csv(run.file("report.csv"));
    run.record("report.csv");
    save_model(trained, run.file("model.json"));
    run.record("model.json");

    auto recon = forward(trained, data.coords);
    save_pgm(detail::dataset_grid(data, recon), run.file("recon.pgm"));
    run.record("recon.pgm");
    save_pgm(detail::dataset_grid(data, data.targets), run.file("target.pgm"));
    run.record("target.pgm");

    auto spec = dft(detail::dataset_grid(data, recon));
    detail::write_spectrum_csv_2d(spec, run.file("spectrum.csv"));
    run.record("spectrum.csv");

    auto [even, odd] = detail::even_odd_energy(spec);
    CsvWriter summary(run.file("summary.csv"), {"even_fraction", "odd_fraction", "final_train_mse"});
    summary.row({even, odd, report.train_mse.back()});
    run.record("summary.csv");
}

// Aliasing: fit sin(2*pi*23 r) at f_s = 128 and resample the model
// at f_s = 256; high-omega0 SIRENs reconstruct an aliased 105 Hz copy.
inline void aliasing(const json& c, RunDir& run) {
    const std::uint64_t seed = c.value("seed", 1);
    SeededRng rng(seed);

    json model_cfg = c.value("model", json::object());
    if (!model_cfg.contains("mapping")) {
        const double omega0 = c.value("omega0", 300.0);
        model_cfg["input_dim"] = 1;
        model_cfg["mapping"] = {{"variant", "siren-first"}, {"omega0", omega0}, {"width", 128}};
        model_cfg["hidden"] = {{{"activation", "sine"}, {"omega0", omega0}, {"width", 128}}};
    }
    json root = c;
    root["model"] = model_cfg;
    if (!root.contains("data"))
        root["data"] = {{"kind", "signal"}, {"f", 23.0}, {"fs", 128.0}, {"n", 128}};

    InrModel model = cfg::model_from(root, rng);
    Dataset data = cfg::data_from(root, seed);
    OptimizerConfig opt = cfg::optimizer_from(root);

    auto [trained, report] = train_full_batch(model, data, opt, rng);
    report.write_csv(run.file("report.csv"));
    run.record("report.csv");
    save_model(trained, run.file("model.json"));
    run.record("model.json");

    const double fs_train = root["data"].value("fs", 128.0);
    const double fs_eval = c.value("fs_eval", 256.0);
    const std::size_t n_train = root["data"].value("n", 128);
    const std::size_t n_eval = std::size_t(double(n_train) * fs_eval / fs_train);

    auto spec_train = dft(forward(trained, signal_coords(n_train, fs_train)));
    detail::write_spectrum_csv_1d(spec_train, fs_train,
                                  run.file("spectrum_fs" + std::to_string(int(fs_train)) + ".csv"));
    run.record("spectrum_fs" + std::to_string(int(fs_train)) + ".csv");

    auto spec_eval = dft(forward(trained, signal_coords(n_eval, fs_eval)));
    detail::write_spectrum_csv_1d(spec_eval, fs_eval,
                                  run.file("spectrum_fs" + std::to_string(int(fs_eval)) + ".csv"));
    run.record("spectrum_fs" + std::to_string(int(fs_eval)) + ".csv");

    const std::size_t bin_signal = std::size_t(c.value("signal_bin", 23));
    const std::size_t bin_alias = std::size_t(c.value("alias_bin", 105));
    const double mag_signal = spec_eval.magnitude(bin_signal);
    const double mag_alias = spec_eval.magnitude(bin_alias);
    CsvWriter summary(run.file("summary.csv"),
                      {"final_train_mse", "mag_signal", "mag_alias", "alias_ratio"});
    summary.row({report.train_mse.back(), mag_signal, mag_alias,
                 mag_signal > 0.0 ? mag_alias / mag_signal : 0.0});
    run.record("summary.csv");
}

// Energy concentration: E(lambda) of the init-NTK dictionary
// for a batch of synthetic images, plus short-training test PSNR, across
// omega0 settings.
inline void energy_profile(const json& c, RunDir& run) {
    const std::uint64_t seed = c.value("seed", 1);
    const std::size_t grid = c.value("grid", 32);
    const std::size_t count = c.value("images", 16);
    std::vector<double> omega_list = c.value("omega0_list", std::vector<double>{1.0, 30.0});
    std::vector<double> thresholds =
        c.value("thresholds", detail::default_thresholds());
    const long eval_steps = c.value("eval_steps", 10);
    const std::size_t width = c.value("width", 64);

    TaskSet tasks = gen_face_proxy_tasks(grid, count, c.value("task_seed", seed + 101), 0.5,
                                         c.value("mask_seed", 1));
    std::vector<std::vector<double>> signals;
    for (const auto& t : tasks.tasks) signals.push_back(t.targets);

    CsvWriter summary(run.file("summary.csv"),
                      {"omega0", "E_at_1e-4", "mean_test_psnr_after_steps"});
    run.record("summary.csv");
    for (double omega0 : omega_list) {
        SeededRng rng(seed);
        auto model = build_model(MappingSpec::siren_first(omega0, width, 2),
                                 {LayerSpec::sine(omega0, width)}, rng);

        auto gram = gram_matrix(model, tasks.tasks.front().coords);
        gram.grid_rows = grid;
        gram.grid_cols = grid;
        auto spec = ntk_eigs(gram);
        auto profile = energy_concentration(spec, signals, thresholds);
        const std::string tag = "energy_omega" + format_double(omega0) + ".csv";
        profile.write_csv(run.file(tag));
        run.record(tag);

        auto curves = finetune_eval(model.theta, model, tasks, eval_steps,
                                    cfg::optimizer_from(c));
        const std::string ftag = "finetune_omega" + format_double(omega0) + ".csv";
        curves.write_csv(run.file(ftag));
        run.record(ftag);

        double e4 = 0.0;
        for (std::size_t i = 0; i < profile.thresholds.size(); ++i)
            if (std::fabs(profile.thresholds[i] - 1e-4) < 1e-12) e4 = profile.values[i];
        summary.row({omega0, e4, curves.mean_test_psnr.back()});
    }
}

// Eigenfunction gallery of the empirical NTK.
inline void ntk_eigs_experiment(const json& c, RunDir& run) {
    const std::uint64_t seed = c.value("seed", 1);
    SeededRng rng(seed);
    const std::size_t grid = c.value("grid", 32);
    const std::size_t top_k = c.value("top_k", 8);

    json root = c;
    if (!root.contains("model") && !root.contains("model_file")) {
        root["model"] = {{"input_dim", 2},
                         {"mapping", {{"variant", "siren-first"}, {"omega0", 30.0}, {"width", 64}}},
                         {"hidden", {{{"activation", "sine"}, {"omega0", 30.0}, {"width", 64}}}}};
    }
    InrModel model = cfg::model_from(root, rng);

    auto gram = gram_matrix(model, image_grid_coords(grid, grid));
    gram.grid_rows = grid;
    gram.grid_cols = grid;
    auto spec = ntk_eigs(gram);
    spec.write_eigenvalues_csv(run.file("eigenvalues.csv"));
    run.record("eigenvalues.csv");
    auto files = export_eigenfunctions(spec, top_k, run.path());
    run.record("eigenfunctions.csv");
    for (const auto& f : files) run.record(f);
}

// Meta vs random: MAML on synthetic tasks, then the NTK-energy and
// fine-tuning comparison against a random initialization on held-out tasks.
inline void meta_vs_random(const json& c, RunDir& run) {
    const std::uint64_t seed = c.value("seed", 1);
    const std::size_t grid = c.value("grid", 16);
    const std::size_t train_tasks = c.value("train_tasks", 64);
    const std::size_t heldout_tasks = c.value("heldout_tasks", 8);
    const std::size_t width = c.value("width", 64);
    const double omega0 = c.value("omega0", 30.0);

    TaskSet all = gen_face_proxy_tasks(grid, train_tasks + heldout_tasks,
                                       c.value("task_seed", seed + 101), 0.5,
                                       c.value("mask_seed", 1));
    TaskSet train_set, heldout;
    train_set.generator = all.generator;
    heldout.generator = all.generator + ":heldout";
    for (std::size_t i = 0; i < train_tasks; ++i) train_set.tasks.push_back(all.tasks[i]);
    for (std::size_t i = train_tasks; i < all.tasks.size(); ++i)
        heldout.tasks.push_back(all.tasks[i]);

    SeededRng rng(seed);
    auto model = build_model(MappingSpec::siren_first(omega0, width, 2),
                             {LayerSpec::sine(omega0, width)}, rng);

    MetaConfig mc;
    mc.algorithm = c.value("algorithm", std::string("maml")) == "reptile"
                       ? MetaConfig::Algorithm::Reptile
                       : MetaConfig::Algorithm::Maml;
    mc.inner_lr = c.value("inner_lr", 1e-2);
    mc.inner_steps = c.value("inner_steps", 2);
    mc.outer_lr = c.value("outer_lr", mc.algorithm == MetaConfig::Algorithm::Maml ? 1e-5 : 0.1);
    mc.outer_iterations = c.value("outer_iterations", 500);
    mc.tasks_per_step = c.value("tasks_per_step", 8);
    mc.seed = c.value("meta_seed", seed + 17);
    if (mc.algorithm == MetaConfig::Algorithm::Reptile) mc.inner_steps = c.value("inner_steps", 5);

    auto [meta_theta, trace] = mc.algorithm == MetaConfig::Algorithm::Maml
                                   ? maml_train(model, train_set, mc)
                                   : reptile_train(model, train_set, mc);
    trace.write_csv(run.file("meta_trace.csv"));
    run.record("meta_trace.csv");
    {
        InrModel meta_model = model;
        meta_model.theta = meta_theta;
        save_model(meta_model, run.file("meta_model.json"));
        run.record("meta_model.json");
    }

    // energy profiles on the held-out signals
    std::vector<std::vector<double>> signals;
    for (const auto& t : heldout.tasks) signals.push_back(t.targets);
    std::vector<double> thresholds = c.value("thresholds", detail::default_thresholds());

    auto profile_for = [&](const std::vector<double>& theta, const std::string& tag) {
        InrModel m = model;
        m.theta = theta;
        auto gram = gram_matrix(m, heldout.tasks.front().coords);
        gram.grid_rows = grid;
        gram.grid_cols = grid;
        auto spec = ntk_eigs(gram);
        auto profile = energy_concentration(spec, signals, thresholds);
        profile.write_csv(run.file(tag));
        run.record(tag);
        return profile;
    };
    auto prof_meta = profile_for(meta_theta, "energy_meta.csv");
    auto prof_rand = profile_for(model.theta, "energy_random.csv");

    const long steps = c.value("finetune_steps", 3);
    auto curves_meta = finetune_eval(meta_theta, model, heldout, steps,
                                     OptimizerConfig::gd(c.value("finetune_gd_lr", 1e-2), steps));
    curves_meta.write_csv(run.file("finetune_meta.csv"));
    run.record("finetune_meta.csv");
    auto curves_rand = finetune_eval(model.theta, model, heldout, steps,
                                     OptimizerConfig::adam(c.value("finetune_adam_lr", 1e-4), steps));
    curves_rand.write_csv(run.file("finetune_random.csv"));
    run.record("finetune_random.csv");

    auto e_at = [](const EnergyProfile& p, double t) {
        for (std::size_t i = 0; i < p.thresholds.size(); ++i)
            if (std::fabs(p.thresholds[i] - t) < 1e-15) return p.values[i];
        return 0.0;
    };
    CsvWriter summary(run.file("summary.csv"),
                      {"E_meta_1e-3", "E_random_1e-3", "psnr_meta_final", "psnr_random_final"});
    summary.row({e_at(prof_meta, 1e-3), e_at(prof_rand, 1e-3),
                 curves_meta.mean_test_psnr.back(), curves_rand.mean_test_psnr.back()});
    run.record("summary.csv");
}

// Single-task baseline: pretraining on one task reshapes the NTK
// toward that task and transfers poorly to the rest of the distribution.
inline void single_task_baseline(const json& c, RunDir& run) {
    const std::uint64_t seed = c.value("seed", 1);
    const std::size_t grid = c.value("grid", 16);
    const std::size_t heldout_tasks = c.value("heldout_tasks", 8);
    const std::size_t width = c.value("width", 64);
    const double omega0 = c.value("omega0", 30.0);
    std::vector<long> depth = c.value("pretrain_iterations", std::vector<long>{50, 500, 2000});

    TaskSet all = gen_face_proxy_tasks(grid, heldout_tasks + 1,
                                       c.value("task_seed", seed + 101), 0.5,
                                       c.value("mask_seed", 1));
    Dataset pretrain_task = all.tasks.front();
    TaskSet heldout;
    heldout.generator = all.generator + ":heldout";
    for (std::size_t i = 1; i < all.tasks.size(); ++i) heldout.tasks.push_back(all.tasks[i]);

    SeededRng rng(seed);
    auto model = build_model(MappingSpec::siren_first(omega0, width, 2),
                             {LayerSpec::sine(omega0, width)}, rng);

    std::vector<std::vector<double>> signals;
    for (const auto& t : heldout.tasks) signals.push_back(t.targets);
    std::vector<double> thresholds = c.value("thresholds", detail::default_thresholds());
    const long steps = c.value("finetune_steps", 10);

    CsvWriter summary(run.file("summary.csv"),
                      {"pretrain_iters", "E_1e-3", "final_mean_test_psnr"});
    run.record("summary.csv");

    auto evaluate_init = [&](const std::vector<double>& theta, const std::string& tag,
                             double iters) {
        InrModel m = model;
        m.theta = theta;
        auto gram = gram_matrix(m, heldout.tasks.front().coords);
        gram.grid_rows = grid;
        gram.grid_cols = grid;
        auto spec = ntk_eigs(gram);
        auto profile = energy_concentration(spec, signals, thresholds);
        profile.write_csv(run.file("energy_" + tag + ".csv"));
        run.record("energy_" + tag + ".csv");
        auto curves = finetune_eval(theta, model, heldout, steps,
                                    OptimizerConfig::adam(1e-4, steps));
        curves.write_csv(run.file("finetune_" + tag + ".csv"));
        run.record("finetune_" + tag + ".csv");
        double e = 0.0;
        for (std::size_t i = 0; i < profile.thresholds.size(); ++i)
            if (std::fabs(profile.thresholds[i] - 1e-3) < 1e-15) e = profile.values[i];
        summary.row({iters, e, curves.mean_test_psnr.back()});
    };

    evaluate_init(model.theta, "random", 0.0);
    for (long it : depth) {
        auto theta = pretrain_single_task(model, pretrain_task, it);
        evaluate_init(theta, "pre" + std::to_string(it), double(it));
    }
}

// Eigenfunction learnability: eigenfunctions with larger eigenvalues are easier
// for the network to learn.
inline void eigenfn_learnability(const json& c, RunDir& run) {
    const std::uint64_t seed = c.value("seed", 1);
    const std::size_t grid = c.value("grid", 32);
    const std::size_t width = c.value("width", 64);
    const double omega0 = c.value("omega0", 30.0);
    std::vector<std::size_t> indices =
        c.value("indices", std::vector<std::size_t>{0, 50, 500});
    const long iterations = c.value("iterations", 2000);

    SeededRng rng(seed);
    auto model = build_model(MappingSpec::siren_first(omega0, width, 2),
                             {LayerSpec::sine(omega0, width)}, rng);

    auto coords = image_grid_coords(grid, grid);
    auto gram = gram_matrix(model, coords);
    gram.grid_rows = grid;
    gram.grid_cols = grid;
    auto spec = ntk_eigs(gram);

    CsvWriter csv(run.file("psnr_vs_index.csv"),
                  {"index", "lambda_rel", "final_train_mse", "final_train_psnr"});
    run.record("psnr_vs_index.csv");
    for (std::size_t index : indices) {
        if (index >= spec.size())
            throw ConfigError("eigenfn-learnability: index " + std::to_string(index) +
                              " exceeds the grid size " + std::to_string(spec.size()));
        Dataset d;
        d.dim = 2;
        d.grid_rows = grid;
        d.grid_cols = grid;
        d.coords = coords;
        d.targets = detail::eigenfunction_target(spec, index);
        d.train_mask.assign(d.size(), 1);
        d.metadata = "ntk-eigenfunction:" + std::to_string(index);
        save_pgm(detail::dataset_grid(d, d.targets),
                 run.file("target_eig_" + std::to_string(index) + ".pgm"));
        run.record("target_eig_" + std::to_string(index) + ".pgm");

        SeededRng train_rng(seed);
        auto [trained, report] = train_full_batch(
            model, d, OptimizerConfig::adam(c.value("lr", 1e-4), iterations), train_rng);
        csv.row({double(index), spec.eig.eigenvalues[index] / spec.eig.eigenvalues[0],
                 report.train_mse.back(), report.train_psnr.back()});
    }
}

// Theorem-1 exactness on a buildable case: polynomial activations, integer
// mapping frequencies, spectrum checked against the enumerated support.
inline void support_check(const json& c, RunDir& run) {
    const std::uint64_t seed = c.value("seed", 1);
    SeededRng rng(seed);

    std::vector<double> freqs = c.value("frequencies", std::vector<double>{1.0, 3.0});
    const std::size_t degree = c.value("degree", 3);
    const std::size_t layers = c.value("layers", 3);
    const std::size_t grid_n = c.value("grid", 256);
    const std::size_t width = c.value("width", 6);

    Matrix omega(freqs.size(), 1);
    for (std::size_t i = 0; i < freqs.size(); ++i) omega(i, 0) = freqs[i];

    std::vector<double> poly = c.value("poly", std::vector<double>{0.1, 0.6, -0.3, 0.25});
    if (poly.size() != degree + 1)
        throw ConfigError("support-check: poly must have degree+1 coefficients");
    std::vector<LayerSpec> hidden;
    for (std::size_t l = 0; l + 1 < layers; ++l)
        hidden.push_back(LayerSpec::polynomial(poly, width));

    std::vector<double> phases(freqs.size());
    for (auto& p : phases) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
    auto model = build_model(MappingSpec::explicit_map(omega, phases), hidden, rng);
    for (auto& v : model.theta) v *= 0.5; // keep the degree-9 expansion well-scaled

    std::vector<double> grid(grid_n);
    for (std::size_t i = 0; i < grid_n; ++i)
        grid[i] = 2.0 * std::numbers::pi * double(i) / double(grid_n);
    auto spectrum = dft(forward(model, grid));
    detail::write_spectrum_csv_1d(spectrum, double(grid_n) / (2.0 * std::numbers::pi),
                                  run.file("spectrum.csv"));
    run.record("spectrum.csv");

    auto support = harmonic_support(omega, SupportBudget::from_poly(degree, layers));
    {
        CsvWriter csv(run.file("support.csv"), {"freq"});
        for (const auto& w : support) csv.row({w[0]});
        run.record("support.csv");
    }
    auto bins = support_bins_1d(support, 2.0 * std::numbers::pi, grid_n);
    const double off = off_support_energy(spectrum, bins);

    CsvWriter summary(run.file("summary.csv"), {"off_support_energy", "support_size"});
    summary.row({off, double(support.size())});
    run.record("summary.csv");
}

} // namespace expts

// Runs one named experiment into out_dir; the RunDir seals a manifest over
// every artifact. Identical configs reproduce identical bytes.
inline std::string run_experiment(const std::string& name, const json& config,
                                  const std::string& out_dir) {
    RunDir run(out_dir, "expt " + name, config);
    try {
        if (name == "imperfect-recovery")
            expts::imperfect_recovery(config, run);
        else if (name == "aliasing")
            expts::aliasing(config, run);
        else if (name == "energy-profile")
            expts::energy_profile(config, run);
        else if (name == "ntk-eigs")
            expts::ntk_eigs_experiment(config, run);
        else if (name == "meta-vs-random")
            expts::meta_vs_random(config, run);
        else if (name == "single-task-baseline")
            expts::single_task_baseline(config, run);
        else if (name == "eigenfn-learnability")
            expts::eigenfn_learnability(config, run);
        else if (name == "support-check")
            expts::support_check(config, run);
        else
            throw ConfigError("unknown experiment '" + name + "'");
    } catch (Error& e) {
        throw;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("experiment ") + name + ": " + e.what());
    }
    run.finalize();
    return run.path();
}

} // namespace inrlab

#endif
