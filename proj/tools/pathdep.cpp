// Experiment runner and invariant checker for the path-dependent SDE library.

#include "pathdep/conditions.hpp"
#include "pathdep/config.hpp"
#include "pathdep/csv.hpp"
#include "pathdep/experiments.hpp"
#include "pathdep/norms.hpp"
#include "pathdep/registry.hpp"
#include "pathdep/stochastics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

using namespace pathdep;

std::uint64_t resolve_seed(bool seed_given, std::uint64_t seed_flag,
                           std::uint64_t config_seed) {
    if (seed_given) return seed_flag;
    if (const char* env = std::getenv("PATHDEP_SEED")) return std::strtoull(env, nullptr, 10);
    return config_seed;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, bool seed_given,
            std::uint64_t seed_flag, int workers_flag) {
    ExperimentConfig config;
    try {
        config = load_config(config_path);
        config.seed = resolve_seed(seed_given, seed_flag, config.seed);
        if (workers_flag > 0) config.workers = static_cast<std::size_t>(workers_flag);
        config.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        const auto start = std::chrono::steady_clock::now();
        const ConvergenceTable table = run_experiment(config);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        std::filesystem::create_directories(out_dir);
        std::vector<std::string> outputs;
        if (config.kind == ExperimentConfig::Kind::Remainder) {
            write_file(std::filesystem::path(out_dir) / "remainder.csv",
                       remainder_csv(table));
            outputs.push_back("remainder.csv");
        } else {
            write_file(std::filesystem::path(out_dir) / "table.csv", table_csv(table));
            outputs.push_back("table.csv");
        }

        nlohmann::json manifest;
        char hash_hex[32];
        std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                      static_cast<unsigned long long>(config_hash(config)));
        manifest["config_hash"] = hash_hex;
        manifest["seed"] = config.seed;
        manifest["workers"] = config.workers;
        manifest["versions"] = {{"pathdep", "0.1.0"}};
        manifest["wall_time_s"] = wall;
        manifest["outputs"] = outputs;
        write_file(std::filesystem::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
        return 0;
    } catch (const SolverDivergence& e) {
        std::cerr << "solver divergence: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

struct CheckPrinter {
    bool all_pass = true;
    void line(bool pass, const std::string& name, const std::string& detail) {
        all_pass &= pass;
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name;
        if (!detail.empty()) std::cout << ": " << detail;
        std::cout << "\n";
    }
};

GridPath random_smooth_path(const GridPtr& grid, std::size_t dim, GaussianStream& rng,
                            double amp = 1.0) {
    GridPath x(grid, dim);
    for (std::size_t c = 0; c < dim; ++c) {
        const double z0 = rng.next();
        double zs[4];
        for (double& z : zs) z = rng.next();
        for (std::size_t i = 0; i < grid->size(); ++i) {
            const double t = grid->point(i) / grid->t_end();
            double v = z0;
            for (int j = 0; j < 4; ++j)
                v += zs[j] * std::sin((j + 1) * M_PI * t) / (j + 1.0);
            x.at(i, c) = amp * v;
        }
    }
    return x;
}

int check_norms(std::uint64_t seed) {
    CheckPrinter out;
    const GridPtr grid = TimeGrid::uniform(1.0, 128, 0.25);
    GaussianStream rng(RngSpec{seed, 1}, 0);
    double worst_tri = 0.0, worst_hom = 0.0, worst_idem = 0.0, worst_sym = 0.0,
           worst_dtri = 0.0, worst_mono = 0.0, worst_cm = 0.0;
    for (int it = 0; it < 100; ++it) {
        const GridPath x = random_smooth_path(grid, 1, rng, 2.0);
        const GridPath y = random_smooth_path(grid, 1, rng, 2.0);
        const double alpha = 0.5 * rng.next_uniform();
        worst_tri = std::max(worst_tri, holder_norm(x + y, alpha) - holder_norm(x, alpha) -
                                            holder_norm(y, alpha));
        GridPath sx = x;
        const double a = 2.0 * rng.next() + 0.1;
        sx *= a;
        worst_hom = std::max(worst_hom, std::abs(holder_norm(sx, alpha) -
                                                 std::abs(a) * holder_norm(x, alpha)));
        const double t = 0.25 + 0.75 * rng.next_uniform();
        worst_idem =
            std::max(worst_idem, sup_norm(stop(stop(x, t), t) - stop(x, t)));
        const double s = 0.25 + 0.75 * rng.next_uniform();
        worst_sym = std::max(worst_sym,
                             std::abs(d_infty(t, x, s, y) - d_infty(s, y, t, x)));
        const GridPath z = random_smooth_path(grid, 1, rng, 2.0);
        const double u = 0.25 + 0.75 * rng.next_uniform();
        worst_dtri = std::max(worst_dtri, d_infty(t, x, s, y) - d_infty(t, x, u, z) -
                                              d_infty(u, z, s, y));
        const double a0 = alpha * rng.next_uniform();
        worst_mono = std::max(
            worst_mono, holder_norm(x, a0) - std::pow(std::max(1.0, 0.75), alpha - a0) *
                                                 holder_norm(x, alpha));
        worst_cm = std::max(worst_cm, holder_norm(x, 0.5) - cm_norm(x) - 1e-9);
    }
    out.line(worst_tri <= 1e-9, "holder triangle inequality",
             "worst slack " + format_g17(worst_tri));
    out.line(worst_hom <= 1e-9, "holder absolute homogeneity",
             "worst error " + format_g17(worst_hom));
    out.line(worst_idem == 0.0, "stop idempotence", "worst " + format_g17(worst_idem));
    out.line(worst_sym <= 1e-12, "d_infty symmetry", "worst " + format_g17(worst_sym));
    out.line(worst_dtri <= 1e-9, "d_infty triangle inequality",
             "worst slack " + format_g17(worst_dtri));
    out.line(worst_mono <= 1e-9, "alpha monotonicity bridge",
             "worst slack " + format_g17(worst_mono));
    out.line(worst_cm <= 1e-9, "cm_norm dominates 1/2-holder",
             "worst slack " + format_g17(worst_cm));
    return out.all_pass ? 0 : 1;
}

int check_interp(std::uint64_t seed) {
    CheckPrinter out;
    const GridPtr grid = TimeGrid::uniform(1.0, 256, 0.0);
    double worst = 0.0;
    for (std::size_t it = 0; it < 100; ++it) {
        GaussianStream rng(RngSpec{seed, it}, 1);
        const std::size_t cells = 4u << (it % 4);  // 4..32
        const Partition p = (it % 2 == 0)
                                ? Partition::uniform_on_grid(*grid, cells)
                                : Partition::jittered_on_grid(*grid, cells, 2.0, rng);
        const GridPath w = sample_brownian(grid, 1, RngSpec{seed, it}, 2);
        std::vector<double> cell_vals(p.cells());
        for (double& v : cell_vals) v = rng.next();
        const std::size_t ia = 1 + static_cast<std::size_t>(rng.next_uniform() * 254);
        const std::size_t ib =
            ia + 1 + static_cast<std::size_t>(rng.next_uniform() * (255 - ia));
        worst = std::max(worst, interp_identity_residual(p, cell_vals, Shape{1, 1}, w,
                                                         grid->point(ia),
                                                         grid->point(std::min<std::size_t>(ib, 256))));
    }
    out.line(worst <= 1e-12, "interpolation rescaling identity",
             "worst residual " + format_g17(worst));
    return out.all_pass ? 0 : 1;
}

int check_kc(std::uint64_t seed, std::size_t samples) {
    CheckPrinter out;
    const GridPtr grid = TimeGrid::uniform(1.0, 512, 0.0);
    const auto sampler = [&](std::size_t i) {
        return sample_brownian(grid, 1, RngSpec{seed, i}, 0);
    };
    struct Case {
        double p, q, alpha, c0;
    };
    for (const Case c : {Case{4, 1, 0.0, 3.0}, Case{4, 1, 0.2, 3.0}, Case{6, 2, 0.25, 15.0}}) {
        const KcReport rep = kc_check(sampler, c.c0, c.p, c.q, c.alpha, samples, grid);
        out.line(rep.pass,
                 "continuity bound p=" + format_g17(c.p) + " q=" + format_g17(c.q) +
                     " alpha=" + format_g17(c.alpha),
                 "estimate " + format_g17(rep.estimate.mean) + " + ci " +
                     format_g17(rep.estimate.ci_half_width) + " <= bound " +
                     format_g17(rep.bound));
    }
    return out.all_pass ? 0 : 1;
}

int check_martingale(std::uint64_t seed, std::size_t samples) {
    CheckPrinter out;
    const GridPtr grid = TimeGrid::uniform(1.0, 256, 0.0);
    const Partition p = Partition::uniform_on_grid(*grid, 16);
    const auto ones = [](double, std::span<double> f) { f[0] = 1.0; };
    McAccumulator acc;
    for (std::size_t i = 0; i < samples; ++i) {
        const GridPath w = sample_brownian(grid, 1, RngSpec{seed, i}, 0);
        std::vector<std::vector<double>> cells(p.cells());
        for (std::size_t c = 0; c < p.cells(); ++c) {
            const std::size_t idx = grid->index_of(p.points()[c]);
            cells[c] = {std::cos(w.at(idx, 0))};  // adapted: uses w up to t_c
        }
        acc.add(doleans_weight(ones, cells, Shape{1, 1}, w, p));
    }
    const McEstimate e = acc.estimate();
    const bool pass = std::abs(e.mean - 1.0) <= 3.0 * e.ci_half_width;
    out.line(pass, "stochastic exponential mean",
             "E[Z_T] = " + format_g17(e.mean) + " +- " + format_g17(e.ci_half_width));
    return out.all_pass ? 0 : 1;
}

int check_derivatives(std::uint64_t seed) {
    CheckPrinter out;
    const GridPtr grid = TimeGrid::uniform(1.0, 128, 0.0);
    GaussianStream rng(RngSpec{seed, 5}, 0);
    const std::vector<std::string> specs = {
        "constant(0.7)", "tanh(scale=0.8, gain=1.3)", "sin(scale=0.5, gain=2)",
        "linear(scale=1.1)", "integral(inner=tanh, scale=1, gain=1)"};
    for (const std::string& spec : specs) {
        const FunctionalPtr f = make_functional(spec, Shape{1, 1});
        double worst_v = 0.0, worst_h = 0.0, worst_v2 = 0.0;
        for (int it = 0; it < 25; ++it) {
            const GridPath x = random_smooth_path(grid, 1, rng, 1.5);
            const PathView v(x);
            const std::size_t ti = 1 + (static_cast<std::size_t>(rng.next_uniform() * 120));
            const double t = grid->point(ti);
            double a[1], b[1], mat_a[1], mat_b[1];
            vertical_derivative(*f, t, v, 0, 0, a);
            vertical_derivative_fd(*f, t, v, 0, 0, b);
            worst_v = std::max(worst_v, std::abs(a[0] - b[0]) / std::max(1.0, std::abs(a[0])));
            horizontal_derivative(*f, t, v, a);
            horizontal_derivative_fd(*f, t, v, b);
            worst_h = std::max(worst_h, std::abs(a[0] - b[0]) / std::max(1.0, std::abs(a[0])));
            second_vertical(*f, t, v, 0, 0, mat_a);
            second_vertical_fd(*f, t, v, 0, 0, mat_b);
            worst_v2 = std::max(worst_v2,
                                std::abs(mat_a[0] - mat_b[0]) / std::max(1.0, std::abs(mat_a[0])));
        }
        out.line(worst_v <= 1e-5 && worst_h <= 1e-5 && worst_v2 <= 1e-5, spec,
                 "vertical " + format_g17(worst_v) + ", horizontal " + format_g17(worst_h) +
                     ", second " + format_g17(worst_v2));
    }
    return out.all_pass ? 0 : 1;
}

int cmd_check(const std::string& suite, std::uint64_t seed, std::size_t samples) {
    if (suite == "norms") return check_norms(seed);
    if (suite == "interp") return check_interp(seed);
    if (suite == "kc") return check_kc(seed, samples ? samples : 400);
    if (suite == "martingale") return check_martingale(seed, samples ? samples : 20000);
    if (suite == "derivatives") return check_derivatives(seed);
    std::cerr << "unknown suite: " << suite
              << " (expected norms|interp|kc|martingale|derivatives)\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"path-dependent SDE experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", suite;
    std::uint64_t seed_flag = 0;
    int workers_flag = 0;
    std::size_t samples_flag = 0;

    CLI::App* run = app.add_subcommand("run", "run a configured experiment");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory");
    CLI::Option* seed_opt = run->add_option("--seed", seed_flag, "seed override");
    run->add_option("--workers", workers_flag, "worker threads");

    CLI::App* check = app.add_subcommand("check", "run an invariant suite");
    check->add_option("suite", suite, "norms|interp|kc|martingale|derivatives")->required();
    CLI::Option* check_seed_opt = check->add_option("--seed", seed_flag, "seed");
    check->add_option("--samples", samples_flag, "sample count override");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed())
        return cmd_run(config_path, out_dir, seed_opt->count() > 0, seed_flag, workers_flag);

    std::uint64_t seed = seed_flag;
    if (check_seed_opt->count() == 0) {
        if (const char* env = std::getenv("PATHDEP_SEED"))
            seed = std::strtoull(env, nullptr, 10);
        else
            seed = 20240915;
    }
    return cmd_check(suite, seed, samples_flag);
}
