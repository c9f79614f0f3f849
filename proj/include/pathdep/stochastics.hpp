#pragma once

#include "pathdep/functional.hpp"
#include "pathdep/grid.hpp"
#include "pathdep/partition.hpp"
#include "pathdep/rng.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pathdep {

// Brownian sample on the grid: independent Gaussian increments per cell,
// variance equal to the cell length, per coordinate. Deterministic given the
// spec and substream.
GridPath sample_brownian(GridPtr grid, std::size_t d, RngSpec spec,
                         std::uint32_t substream = 0);

// Monte Carlo mean with a 95% normal-approximation confidence half-width.
struct McEstimate {
    double mean = 0.0;
    double variance = 0.0;
    std::size_t n_samples = 0;
    double ci_half_width = 0.0;
};

class McAccumulator {
public:
    void add(double x);
    McEstimate estimate() const;
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Probability estimate from a success count; switches to the exact
// Clopper-Pearson interval when either tail count is below 10.
McEstimate probability_estimate(std::size_t successes, std::size_t n);

// Explicit constants of the moment estimates, valid for a balance constant
// c_T and driving dimension d.
struct BoundConstants {
    double c_T = 1.0;
    std::size_t d = 1;

    // Burkholder-type constant ((p^3/2)/(p-1))^(p/2), p >= 2.
    double w_p(double p) const;
    // 3^p w_p c_T^(p/2): adapted-interpolation maximal inequality.
    double w_hat_p(double p) const;
    // E|Z|^(pq) c_T^(pq) with Z standard d-dimensional Gaussian.
    double w_hat_pq(double p, double q) const;
    double k_alpha_pq(double alpha, double p, double q) const;
};

// E|Z|^nu for Z ~ N(0, I_d), via the chi-distribution moment formula.
double gaussian_abs_moment(double nu, std::size_t d);

// Quantitative continuity constant 2^(p+q) (2^(q/p - alpha) - 1)^(-p),
// defined for p >= 1, q > 0, 0 <= alpha < q/p; strictly increasing in alpha.
double kc_constant(double alpha, double p, double q);

struct KcReport {
    double alpha = 0.0, p = 0.0, q = 0.0, c0 = 0.0;
    McEstimate estimate;  // E[ sup-pair ratio^p ]
    double bound = 0.0;
    bool pass = false;
};

// Monte Carlo check of E[sup_{s!=t} |X_s-X_t|^p / |s-t|^(alpha p)] against
// kc_constant * c0 * (T-r)^(1+q-alpha p), for paths produced by the sampler.
KcReport kc_check(const std::function<GridPath(std::size_t)>& sampler, double c0,
                  double p, double q, double alpha, std::size_t n_samples,
                  const GridPtr& grid);

// Residual of the exact rescaling identity between left-point sums against
// the interpolated noise and rescaled Ito sums against the raw noise, for a
// process constant on partition cells. Zero up to roundoff.
double interp_identity_residual(const Partition& p, std::span<const double> cell_values,
                                Shape x_shape, const GridPath& w, double s, double t);

struct MomentReport {
    double s = 0.0, t = 0.0;
    double p_exp = 0.0, q_exp = 0.0;
    McEstimate estimate;  // E[(int_s^t |nWdot|^q du)^p]
    double bound = 0.0;
    bool pass = false;
};

// Monte Carlo check of the interpolated-noise integral moment bound
// w_hat_pq |T_n|^(-pq/2) (t-s)^p on a random grid pair s < t.
MomentReport interp_moment_check(const Partition& p, const GridPtr& grid, std::size_t d,
                                 double q_exp, double p_exp, std::size_t n_samples,
                                 RngSpec spec);

// Terminal value of the stochastic exponential for the piecewise process
// X_t^(l) = sum_i sum_j f_{j,l}(t) Y_i^(j,l) 1_{[t_i, t_{i+1})}(t):
//   Z_T = exp( sum X dW - 1/2 int |X|^2 ds ),
// with left-point sums on w's grid. Y_i must be computable from information
// up to t_i; the result is then an exact discrete martingale with mean one.
double doleans_weight(const std::function<void(double, std::span<double>)>& f,
                      std::span<const std::vector<double>> cell_matrices, Shape f_shape,
                      const GridPath& w, const Partition& p);

// Solves y(t) = w(t) - int_r^{r v t} (hdot - d/ds L_n(y)) ds by cellwise
// forward substitution; the interpolated slope over a cell only needs values
// of y at earlier partition points. Reconstruction is exact on the grid.
GridPath girsanov_driver(const GridPath& h, const Partition& p, const GridPath& w);

}  // namespace pathdep
