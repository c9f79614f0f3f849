#pragma once

#include "pathdep/partition.hpp"
#include "pathdep/solver.hpp"
#include "pathdep/stochastics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pathdep {

// Named Cameron-Martin drivers.
struct DriverSpec {
    enum class Kind { Zero, Linear, Sin };
    Kind kind = Kind::Zero;
    double amplitude = 0.0;  // linear: h(t) = a t;  sin: h(t) = a sin(2 pi f t)
    double frequency = 1.0;

    GridPath sample(const GridPtr& grid, std::size_t d) const;
    std::string to_string() const;
    static DriverSpec parse(const std::string& text);
};

struct ExperimentConfig {
    enum class Kind { Forward, Reverse, GridRate, Remainder };
    enum class Preset { Forward, Reverse };

    Kind kind = Kind::Forward;
    Preset preset = Preset::Forward;  // for grid_rate / remainder

    std::string drift_spec = "constant(0)";
    std::string diffusion_spec = "tanh(scale=0.8, gain=1)";
    std::size_t m = 1;
    std::size_t d = 1;
    std::vector<double> x0{0.2};

    DriverSpec driver;

    double t_end = 1.0;
    double delay = 0.0;
    std::size_t master_cells = 4096;

    std::vector<std::size_t> sweep_cells{8, 16, 32, 64};
    std::string sweep_family = "dyadic";  // dyadic | jitter
    double balance_cap = 2.0;

    double alpha = 0.2;
    std::vector<double> epsilons{0.5, 0.25, 0.125};
    std::size_t n_samples = 2000;
    std::uint64_t seed = 0;
    std::size_t workers = 1;

    SdeModel make_model() const;
    GridPtr make_grid() const;
    PartitionSweep make_sweep() const;
    void validate() const;
};

struct ConvergenceRow {
    std::size_t cells = 0;
    double mesh = 0.0;
    std::vector<McEstimate> exceedance;      // one per epsilon
    McEstimate pseudometric;                 // E[ ||.||_{alpha,r} ^ 1 ]
    McEstimate grid_rate;                    // E[max_j |nY-Y|^2] / mesh^(2 alpha)
    double bias_footnote = 0.0;              // reference self-refinement estimate
    std::vector<McEstimate> remainder_m2;    // remainder diagnostics, 3 terms
};

struct ConvergenceTable {
    std::string kind;
    double alpha = 0.0;
    std::vector<double> epsilons;
    std::vector<ConvergenceRow> rows;

    // Least-squares log-log slopes of the remainder second moments vs mesh.
    std::vector<double> remainder_slopes() const;
};

// Exceedance of ||x_{nW} - X||_{alpha,r} per epsilon and partition, with the
// sequence equation driven by interpolated noise and the reference solution
// on the master grid, coupled through one Brownian sample per draw.
ConvergenceTable run_forward(const ExperimentConfig& config);

// Exceedance of ||nY - x_h||_{alpha,r} for the tilted dynamics simulated
// directly with a fresh Brownian sample (equal in law to the tilted measure
// of the original solution).
ConvergenceTable run_reverse(const ExperimentConfig& config);

// E[max_j |nY_{t_j} - Y_{t_j}|^2] / mesh^(2 alpha) across the sweep, for the
// configured preset.
ConvergenceTable run_grid_rate(const ExperimentConfig& config);

// Second moments of the running-max integrals of the three terms of the
// remainder decomposition, per partition.
ConvergenceTable remainder_diagnostics(const ExperimentConfig& config);

ConvergenceTable run_experiment(const ExperimentConfig& config);

}  // namespace pathdep
