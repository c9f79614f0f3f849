#include "pathdep/experiments.hpp"

#include "pathdep/norms.hpp"
#include "pathdep/registry.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace pathdep {

namespace {

// Runs fn(draw) for draw = 0..n-1 on the requested number of workers and
// returns the results ordered by draw index. The fold downstream is then
// independent of scheduling, so worker counts never change an estimate.
template <typename PerDraw>
std::vector<PerDraw> parallel_map(std::size_t n, std::size_t workers,
                                  const std::function<PerDraw(std::size_t)>& fn) {
    std::vector<PerDraw> results(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) results[i] = fn(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                results[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return results;
}

std::vector<std::size_t> partition_point_indices(const Partition& p, const TimeGrid& grid) {
    std::vector<std::size_t> idx(p.points().size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = grid.index_of(p.points()[i]);
    return idx;
}

double max_sq_at_points(const GridPath& a, const GridPath& b,
                        const std::vector<std::size_t>& idx) {
    double best = 0.0;
    for (std::size_t j : idx) {
        double s = 0.0;
        for (std::size_t c = 0; c < a.dim(); ++c) {
            const double v = a.at(j, c) - b.at(j, c);
            s += v * v;
        }
        best = std::max(best, s);
    }
    return best;
}

// Reference trajectory on the coarsened grid (every other master point, same
// noise); the sup distance at shared points estimates the discretization
// bias of the master-grid reference.
double self_refinement_bias(const SdeModel& model, const GridPath& w) {
    const TimeGrid& grid = w.grid();
    if (grid.cells() % 2 != 0) return 0.0;
    std::vector<double> pts;
    pts.reserve(grid.cells() / 2 + 1);
    for (std::size_t i = 0; i < grid.size(); i += 2) pts.push_back(grid.point(i));
    const GridPtr coarse = TimeGrid::from_points(std::move(pts), grid.delay());
    GridPath wc(coarse, w.dim());
    for (std::size_t i = 0; i < coarse->size(); ++i)
        for (std::size_t c = 0; c < w.dim(); ++c) wc.at(i, c) = w.at(2 * i, c);
    const GridPath fine = euler_sde(model, w);
    const GridPath rough = euler_sde(model, wc);
    double bias = 0.0;
    for (std::size_t i = 0; i < coarse->size(); ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < fine.dim(); ++c) {
            const double v = fine.at(2 * i, c) - rough.at(i, c);
            s += v * v;
        }
        bias = std::max(bias, std::sqrt(s));
    }
    return bias;
}

struct DrawStats {
    std::vector<double> norms;     // per partition
    std::vector<double> max_sq;    // per partition
    std::vector<double> rem_m2;    // 3 per partition (remainder kind)
    double bias = 0.0;
};

ConvergenceTable assemble_table(const ExperimentConfig& config,
                                const PartitionSweep& sweep,
                                const std::vector<DrawStats>& draws,
                                const char* kind, bool with_norms, bool with_rate) {
    ConvergenceTable table;
    table.kind = kind;
    table.alpha = config.alpha;
    table.epsilons = config.epsilons;
    const std::size_t n_parts = sweep.partitions.size();
    const std::size_t n = draws.size();

    McAccumulator bias_acc;
    for (const DrawStats& ds : draws) bias_acc.add(ds.bias);

    for (std::size_t pi = 0; pi < n_parts; ++pi) {
        ConvergenceRow row;
        row.cells = sweep.partitions[pi].cells();
        row.mesh = sweep.partitions[pi].mesh();
        row.bias_footnote = bias_acc.count() ? bias_acc.mean() : 0.0;
        if (with_norms) {
            for (double eps : config.epsilons) {
                std::size_t count = 0;
                for (const DrawStats& ds : draws) count += ds.norms[pi] >= eps;
                row.exceedance.push_back(probability_estimate(count, n));
            }
            McAccumulator pseudo;
            for (const DrawStats& ds : draws) pseudo.add(std::min(ds.norms[pi], 1.0));
            row.pseudometric = pseudo.estimate();
        }
        if (with_rate) {
            McAccumulator rate;
            for (const DrawStats& ds : draws) rate.add(ds.max_sq[pi]);
            McEstimate e = rate.estimate();
            const double scale = std::pow(row.mesh, 2.0 * config.alpha);
            e.mean /= scale;
            e.ci_half_width /= scale;
            e.variance /= scale * scale;
            row.grid_rate = e;
        }
        if (!draws.empty() && !draws.front().rem_m2.empty()) {
            for (std::size_t term = 0; term < 3; ++term) {
                McAccumulator acc;
                for (const DrawStats& ds : draws) acc.add(ds.rem_m2[pi * 3 + term]);
                row.remainder_m2.push_back(acc.estimate());
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

RoleAssignment preset_roles(const ExperimentConfig& config, const SdeModel& model) {
    return config.preset == ExperimentConfig::Preset::Forward ? forward_roles(model)
                                                              : reverse_roles(model);
}

}  // namespace

GridPath DriverSpec::sample(const GridPtr& grid, std::size_t d) const {
    GridPath h(grid, d);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double t = grid->point(i);
        double v = 0.0;
        switch (kind) {
            case Kind::Zero: break;
            case Kind::Linear: v = amplitude * t; break;
            case Kind::Sin: v = amplitude * std::sin(2.0 * M_PI * frequency * t); break;
        }
        for (std::size_t c = 0; c < d; ++c) h.at(i, c) = v;
    }
    return h;
}

std::string DriverSpec::to_string() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Zero: os << "zero"; break;
        case Kind::Linear: os << "linear(slope=" << amplitude << ")"; break;
        case Kind::Sin:
            os << "sin(amplitude=" << amplitude << ", frequency=" << frequency << ")";
            break;
    }
    return os.str();
}

DriverSpec DriverSpec::parse(const std::string& text) {
    DriverSpec spec;
    const auto open = text.find('(');
    const std::string family = text.substr(0, open);
    auto param = [&](const std::string& key, double fallback) {
        if (open == std::string::npos) return fallback;
        const auto pos = text.find(key + "=", open);
        if (pos == std::string::npos) return fallback;
        return std::stod(text.substr(pos + key.size() + 1));
    };
    if (family == "zero") {
        spec.kind = Kind::Zero;
    } else if (family == "linear") {
        spec.kind = Kind::Linear;
        spec.amplitude = param("slope", 1.0);
    } else if (family == "sin") {
        spec.kind = Kind::Sin;
        spec.amplitude = param("amplitude", 0.5);
        spec.frequency = param("frequency", 1.0);
    } else {
        throw std::invalid_argument("unknown driver: " + text);
    }
    return spec;
}

SdeModel ExperimentConfig::make_model() const {
    SdeModel model;
    model.m = m;
    model.d = d;
    model.drift = make_functional(drift_spec, Shape{m, 1});
    model.sigma = make_functional(diffusion_spec, Shape{m, d});
    if (x0.size() != m) throw std::invalid_argument("x0 must have m entries");
    model.initial_segment = InitialSegment::constant(std::span<const double>(x0), delay);
    return model;
}

GridPtr ExperimentConfig::make_grid() const {
    return TimeGrid::uniform(t_end, master_cells, delay);
}

PartitionSweep ExperimentConfig::make_sweep() const {
    const GridPtr grid = make_grid();
    if (sweep_family == "jitter") {
        GaussianStream rng(RngSpec{seed, 0xA11CE}, 3);
        return PartitionSweep::jittered_on_grid(*grid, sweep_cells, balance_cap, rng);
    }
    return PartitionSweep::dyadic_on_grid(*grid, sweep_cells, balance_cap);
}

void ExperimentConfig::validate() const {
    if (!(alpha >= 0.0 && alpha < 0.5))
        throw std::invalid_argument("alpha must lie in [0, 1/2)");
    if (epsilons.empty()) throw std::invalid_argument("at least one epsilon required");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0)) throw std::invalid_argument("epsilons must be positive");
        if (i > 0 && epsilons[i] >= epsilons[i - 1])
            throw std::invalid_argument("epsilons must be sorted decreasing");
    }
    if (n_samples == 0) throw std::invalid_argument("n_samples must be positive");
    if (sweep_cells.empty()) throw std::invalid_argument("sweep must not be empty");
    if (sweep_family != "dyadic" && sweep_family != "jitter")
        throw std::invalid_argument("unknown sweep family: " + sweep_family);
    make_model();    // registry names known, dims consistent
    make_sweep();    // divisibility and balance
}

ConvergenceTable run_forward(const ExperimentConfig& config) {
    config.validate();
    const GridPtr grid = config.make_grid();
    const SdeModel model = config.make_model();
    const PartitionSweep sweep = config.make_sweep();
    const RoleAssignment roles = forward_roles(model);
    const GridPath h0 = DriverSpec{}.sample(grid, config.d);

    std::vector<std::vector<std::size_t>> ppi;
    for (const Partition& p : sweep.partitions)
        ppi.push_back(partition_point_indices(p, *grid));

    const auto per_draw = [&](std::size_t i) -> DrawStats {
        DrawStats ds;
        try {
            const GridPath w =
                sample_brownian(grid, config.d, RngSpec{config.seed, i}, 0);
            const GridPath x = euler_sde(model, w);
            ds.bias = self_refinement_bias(model, w);
            for (std::size_t pi = 0; pi < sweep.partitions.size(); ++pi) {
                const GridPath yn =
                    sequence_sde(roles, model.initial_segment, h0, sweep.partitions[pi], w);
                const GridPath diff = yn - x;
                ds.norms.push_back(holder_norm(diff, config.alpha));
                ds.max_sq.push_back(max_sq_at_points(yn, x, ppi[pi]));
            }
        } catch (const SolverDivergence& e) {
            throw SolverDivergence(std::string(e.what()) + " (sample " +
                                   std::to_string(i) + ")");
        }
        return ds;
    };
    const auto draws =
        parallel_map<DrawStats>(config.n_samples, config.workers, per_draw);
    return assemble_table(config, sweep, draws, "forward", true, true);
}

ConvergenceTable run_reverse(const ExperimentConfig& config) {
    config.validate();
    const GridPtr grid = config.make_grid();
    const SdeModel model = config.make_model();
    const PartitionSweep sweep = config.make_sweep();
    const RoleAssignment roles = reverse_roles(model);
    const GridPath h = config.driver.sample(grid, config.d);

    const GridPath x_h = skeleton(model, h, grid).solution;
    // Self-refinement of the deterministic reference, computed once.
    double skeleton_bias = 0.0;
    if (grid->cells() % 2 == 0) {
        std::vector<double> pts;
        for (std::size_t i = 0; i < grid->size(); i += 2) pts.push_back(grid->point(i));
        const GridPtr coarse = TimeGrid::from_points(std::move(pts), grid->delay());
        GridPath hc(coarse, config.d);
        for (std::size_t i = 0; i < coarse->size(); ++i)
            for (std::size_t c = 0; c < config.d; ++c) hc.at(i, c) = h.at(2 * i, c);
        const GridPath xc = skeleton(model, hc, coarse).solution;
        for (std::size_t i = 0; i < coarse->size(); ++i) {
            double s = 0.0;
            for (std::size_t c = 0; c < config.m; ++c) {
                const double v = x_h.at(2 * i, c) - xc.at(i, c);
                s += v * v;
            }
            skeleton_bias = std::max(skeleton_bias, std::sqrt(s));
        }
    }

    std::vector<std::vector<std::size_t>> ppi;
    for (const Partition& p : sweep.partitions)
        ppi.push_back(partition_point_indices(p, *grid));

    const auto per_draw = [&](std::size_t i) -> DrawStats {
        DrawStats ds;
        ds.bias = skeleton_bias;
        try {
            const GridPath b =
                sample_brownian(grid, config.d, RngSpec{config.seed, i}, 0);
            for (std::size_t pi = 0; pi < sweep.partitions.size(); ++pi) {
                const GridPath yn =
                    sequence_sde(roles, model.initial_segment, h, sweep.partitions[pi], b);
                const GridPath diff = yn - x_h;
                ds.norms.push_back(holder_norm(diff, config.alpha));
                ds.max_sq.push_back(max_sq_at_points(yn, x_h, ppi[pi]));
            }
        } catch (const SolverDivergence& e) {
            throw SolverDivergence(std::string(e.what()) + " (sample " +
                                   std::to_string(i) + ")");
        }
        return ds;
    };
    const auto draws =
        parallel_map<DrawStats>(config.n_samples, config.workers, per_draw);
    return assemble_table(config, sweep, draws, "reverse", true, true);
}

ConvergenceTable run_grid_rate(const ExperimentConfig& config) {
    config.validate();
    const GridPtr grid = config.make_grid();
    const SdeModel model = config.make_model();
    const PartitionSweep sweep = config.make_sweep();
    const RoleAssignment roles = preset_roles(config, model);
    const GridPath h = config.driver.sample(grid, config.d);

    std::vector<std::vector<std::size_t>> ppi;
    for (const Partition& p : sweep.partitions)
        ppi.push_back(partition_point_indices(p, *grid));

    const auto per_draw = [&](std::size_t i) -> DrawStats {
        DrawStats ds;
        try {
            const GridPath w =
                sample_brownian(grid, config.d, RngSpec{config.seed, i}, 0);
            const GridPath y = limit_sde(roles, model.initial_segment, h, w);
            for (std::size_t pi = 0; pi < sweep.partitions.size(); ++pi) {
                const GridPath yn =
                    sequence_sde(roles, model.initial_segment, h, sweep.partitions[pi], w);
                ds.max_sq.push_back(max_sq_at_points(yn, y, ppi[pi]));
            }
        } catch (const SolverDivergence& e) {
            throw SolverDivergence(std::string(e.what()) + " (sample " +
                                   std::to_string(i) + ")");
        }
        return ds;
    };
    const auto draws =
        parallel_map<DrawStats>(config.n_samples, config.workers, per_draw);
    return assemble_table(config, sweep, draws, "grid_rate", false, true);
}

ConvergenceTable remainder_diagnostics(const ExperimentConfig& config) {
    config.validate();
    const GridPtr grid = config.make_grid();
    const SdeModel model = config.make_model();
    const PartitionSweep sweep = config.make_sweep();
    const RoleAssignment roles = preset_roles(config, model);
    const GridPath h = config.driver.sample(grid, config.d);
    const std::size_t m = config.m, d = config.d;

    std::vector<std::vector<std::size_t>> ppi;
    for (const Partition& p : sweep.partitions)
        ppi.push_back(partition_point_indices(p, *grid));

    const auto per_draw = [&](std::size_t i) -> DrawStats {
        DrawStats ds;
        const GridPath w = sample_brownian(grid, config.d, RngSpec{config.seed, i}, 0);
        const GridPath hdot_src = h;  // driver sampled on the master grid
        for (std::size_t pi = 0; pi < sweep.partitions.size(); ++pi) {
            const Partition& part = sweep.partitions[pi];
            const GridPath yn = sequence_sde(roles, model.initial_segment, h, part, w);
            const GridPath nw = interpolate(part, w);

            std::vector<double> ia(m, 0.0), ib(m, 0.0), ic(m, 0.0);
            double ma = 0.0, mb = 0.0, mc = 0.0;
            // Per-partition-cell caches of the frozen-time quantities.
            std::size_t cached_cell = static_cast<std::size_t>(-1);
            std::size_t sb_idx = 0;
            double t_sb = 0.0, gamma = 0.0;
            std::vector<double> bbar_sb(m * d), sig_sb(m * d), bh_sb(m * d), rem(m);
            std::vector<double> dbar(m * d * m);
            std::vector<double> bbar_s(m * d), phi(m), dy(m), row(m);

            const auto& pts = grid->points();
            std::size_t next_pp = 1;  // partition point counter
            for (std::size_t j = grid->delay_index(); j + 1 < pts.size(); ++j) {
                const double t = pts[j];
                const double dt = pts[j + 1] - t;
                const auto br = part.locate(t);
                if (br.index != cached_cell) {
                    cached_cell = br.index;
                    t_sb = part.points()[br.pred];
                    sb_idx = grid->index_of(t_sb);
                    gamma = part.gamma(t);
                    const PathView zs(yn, sb_idx);
                    roles.b_bar->evaluate(t_sb, zs, bbar_sb);
                    roles.sigma->evaluate(t_sb, zs, sig_sb);
                    roles.b_h->evaluate(t_sb, zs, bh_sb);
                    remainder_term(roles, t_sb, zs, rem);
                    for (std::size_t k = 0; k < m; ++k)
                        for (std::size_t l = 0; l < d; ++l) {
                            vertical_derivative(*roles.b_bar, t_sb, zs, k, l, row);
                            for (std::size_t a = 0; a < m; ++a)
                                dbar[(k * d + l) * m + a] = row[a];
                        }
                }
                const PathView zt(yn, j);
                roles.b_bar->evaluate(t, zt, bbar_s);

                // Phi = B_h (h(s)-h(sb)) + B_bar (nW(s)-nW(sb)) + Sigma (w(s)-w(sb))
                for (std::size_t k = 0; k < m; ++k) {
                    double v = 0.0;
                    for (std::size_t l = 0; l < d; ++l) {
                        v += bh_sb[k * d + l] * (hdot_src.at(j, l) - hdot_src.at(sb_idx, l));
                        v += bbar_sb[k * d + l] * (nw.at(j, l) - nw.at(sb_idx, l));
                        v += sig_sb[k * d + l] * (w.at(j, l) - w.at(sb_idx, l));
                    }
                    phi[k] = v;
                }
                for (std::size_t k = 0; k < m; ++k) dy[k] = yn.at(j, k) - yn.at(sb_idx, k);

                for (std::size_t k = 0; k < m; ++k) {
                    double a_term = 0.0, b_term = 0.0, c_term = 0.0;
                    for (std::size_t l = 0; l < d; ++l) {
                        const double nwdot = (nw.at(j + 1, l) - nw.at(j, l)) / dt;
                        double grad_dy = 0.0, grad_phi = 0.0;
                        for (std::size_t a = 0; a < m; ++a) {
                            grad_dy += dbar[(k * d + l) * m + a] * dy[a];
                            grad_phi += dbar[(k * d + l) * m + a] * phi[a];
                        }
                        a_term += (bbar_s[k * d + l] - bbar_sb[k * d + l] - grad_dy) * nwdot;
                        b_term += (grad_dy - grad_phi) * nwdot;
                        c_term += grad_phi * nwdot;
                    }
                    c_term -= rem[k] * gamma;
                    ia[k] += a_term * dt;
                    ib[k] += b_term * dt;
                    ic[k] += c_term * dt;
                }

                if (next_pp < ppi[pi].size() && j + 1 == ppi[pi][next_pp]) {
                    ++next_pp;
                    double na = 0.0, nb = 0.0, nc = 0.0;
                    for (std::size_t k = 0; k < m; ++k) {
                        na += ia[k] * ia[k];
                        nb += ib[k] * ib[k];
                        nc += ic[k] * ic[k];
                    }
                    ma = std::max(ma, na);
                    mb = std::max(mb, nb);
                    mc = std::max(mc, nc);
                }
            }
            ds.rem_m2.push_back(ma);
            ds.rem_m2.push_back(mb);
            ds.rem_m2.push_back(mc);
        }
        return ds;
    };
    const auto draws =
        parallel_map<DrawStats>(config.n_samples, config.workers, per_draw);
    return assemble_table(config, sweep, draws, "remainder", false, false);
}

std::vector<double> ConvergenceTable::remainder_slopes() const {
    std::vector<double> slopes;
    if (rows.empty() || rows.front().remainder_m2.empty()) return slopes;
    const std::size_t terms = rows.front().remainder_m2.size();
    for (std::size_t term = 0; term < terms; ++term) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const double n = static_cast<double>(rows.size());
        for (const ConvergenceRow& row : rows) {
            const double lx = std::log(row.mesh);
            const double ly = std::log(std::max(row.remainder_m2[term].mean, 1e-300));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        slopes.push_back((n * sxy - sx * sy) / (n * sxx - sx * sx));
    }
    return slopes;
}

ConvergenceTable run_experiment(const ExperimentConfig& config) {
    switch (config.kind) {
        case ExperimentConfig::Kind::Forward: return run_forward(config);
        case ExperimentConfig::Kind::Reverse: return run_reverse(config);
        case ExperimentConfig::Kind::GridRate: return run_grid_rate(config);
        default: return remainder_diagnostics(config);
    }
}

}  // namespace pathdep
