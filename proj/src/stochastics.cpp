#include "pathdep/stochastics.hpp"

#include "pathdep/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pathdep {

namespace {

// Regularized incomplete beta via Lentz's continued fraction.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 200;
    constexpr double kEps = 3e-14;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double betai(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log(1.0 - x);
    const double bt = std::exp(ln);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double betai_inv(double a, double b, double p) {
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (betai(a, b, mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

GridPath sample_brownian(GridPtr grid, std::size_t d, RngSpec spec,
                         std::uint32_t substream) {
    GaussianStream g(spec, substream);
    GridPath w(std::move(grid), d);
    const auto& pts = w.grid().points();
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double sd = std::sqrt(pts[i] - pts[i - 1]);
        for (std::size_t c = 0; c < d; ++c)
            w.at(i, c) = w.at(i - 1, c) + sd * g.next();
    }
    return w;
}

void McAccumulator::add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

McEstimate McAccumulator::estimate() const {
    McEstimate e;
    e.n_samples = n_;
    e.mean = mean_;
    e.variance = n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    e.ci_half_width =
        n_ > 0 ? 1.96 * std::sqrt(e.variance / static_cast<double>(n_)) : 0.0;
    return e;
}

McEstimate probability_estimate(std::size_t successes, std::size_t n) {
    McEstimate e;
    e.n_samples = n;
    if (n == 0) return e;
    const double k = static_cast<double>(successes);
    const double nn = static_cast<double>(n);
    e.mean = k / nn;
    e.variance = e.mean * (1.0 - e.mean);
    const std::size_t tail = std::min(successes, n - successes);
    if (tail < 10) {
        // Exact binomial interval at 95%.
        const double lo = successes == 0
                              ? 0.0
                              : betai_inv(k, nn - k + 1.0, 0.025);
        const double hi = successes == n
                              ? 1.0
                              : betai_inv(k + 1.0, nn - k, 0.975);
        e.ci_half_width = 0.5 * (hi - lo);
    } else {
        e.ci_half_width = 1.96 * std::sqrt(e.variance / nn);
    }
    return e;
}

double BoundConstants::w_p(double p) const {
    if (p < 2.0) throw std::invalid_argument("w_p needs p >= 2");
    return std::pow(p * p * p / 2.0 / (p - 1.0), p / 2.0);
}

double BoundConstants::w_hat_p(double p) const {
    return std::pow(3.0, p) * w_p(p) * std::pow(c_T, p / 2.0);
}

double BoundConstants::w_hat_pq(double p, double q) const {
    return gaussian_abs_moment(p * q, d) * std::pow(c_T, p * q);
}

double BoundConstants::k_alpha_pq(double alpha, double p, double q) const {
    return kc_constant(alpha, p, q);
}

double gaussian_abs_moment(double nu, std::size_t d) {
    if (nu < 0.0) throw std::invalid_argument("moment order must be nonnegative");
    const double dd = static_cast<double>(d);
    return std::exp(0.5 * nu * std::log(2.0) + std::lgamma(0.5 * (dd + nu)) -
                    std::lgamma(0.5 * dd));
}

double kc_constant(double alpha, double p, double q) {
    if (p < 1.0 || q <= 0.0 || alpha < 0.0 || alpha >= q / p)
        throw std::invalid_argument("kc_constant needs p >= 1, q > 0, 0 <= alpha < q/p");
    return std::pow(2.0, p + q) * std::pow(std::pow(2.0, q / p - alpha) - 1.0, -p);
}

KcReport kc_check(const std::function<GridPath(std::size_t)>& sampler, double c0,
                  double p, double q, double alpha, std::size_t n_samples,
                  const GridPtr& grid) {
    KcReport report;
    report.alpha = alpha;
    report.p = p;
    report.q = q;
    report.c0 = c0;
    const double span = grid->t_end() - grid->delay();
    report.bound = kc_constant(alpha, p, q) * c0 * std::pow(span, 1.0 + q - alpha * p);
    McAccumulator acc;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const GridPath x = sampler(i);
        acc.add(std::pow(holder_quotient(x, alpha), p));
    }
    report.estimate = acc.estimate();
    report.pass = report.estimate.mean + report.estimate.ci_half_width <= report.bound;
    return report;
}

double interp_identity_residual(const Partition& p, std::span<const double> cell_values,
                                Shape x_shape, const GridPath& w, double s, double t) {
    const std::size_t m = x_shape.rows, d = x_shape.cols;
    if (cell_values.size() != p.cells() * x_shape.count())
        throw std::invalid_argument("one matrix per partition cell required");
    if (w.dim() != d) throw std::invalid_argument("noise dimension mismatch");
    if (s > t) throw std::invalid_argument("requires s <= t");

    const auto x_at = [&](std::size_t cell) {
        return cell_values.subspan(cell * m * d, m * d);
    };
    const GridPath nw = interpolate(p, w);
    const auto& pts = w.grid().points();

    // Left-point sums of X_{u_under} against increments of the interpolant.
    std::vector<double> lhs(m, 0.0);
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        const double a = std::max(pts[j], s);
        const double b = std::min(pts[j + 1], t);
        if (a >= b) continue;
        const auto xm = x_at(p.locate(a).pred);
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t l = 0; l < d; ++l)
                lhs[k] += xm[k * d + l] * (nw.eval(b, l) - nw.eval(a, l));
    }

    // Rescaled Ito sums per the interpolation identity.
    std::vector<double> rhs(m, 0.0);
    const double t1 = p.points()[1];
    const double s_eff = std::max(s, t1);
    if (t > s_eff) {
        const auto& pp = p.points();
        const std::size_t k_cells = p.cells();
        const std::size_t i = p.locate(s_eff).index;
        const std::size_t j = (t >= p.t_end()) ? k_cells - 1 : p.locate(t).index;
        const auto add_scaled = [&](std::size_t cell, double factor) {
            // factor * X(cell-1) * (W(t_cell) - W(t_{cell-1}))
            const auto xm = x_at(cell - 1);
            const std::size_t ia = w.grid().index_of(pp[cell - 1]);
            const std::size_t ib = w.grid().index_of(pp[cell]);
            for (std::size_t kk = 0; kk < m; ++kk)
                for (std::size_t l = 0; l < d; ++l)
                    rhs[kk] += factor * xm[kk * d + l] * (w.at(ib, l) - w.at(ia, l));
        };
        if (i == j) {
            add_scaled(i, (t - s_eff) / (pp[i + 1] - pp[i]));
        } else {
            add_scaled(i, (pp[i + 1] - s_eff) / (pp[i + 1] - pp[i]));
            for (std::size_t a = i; a + 1 < j; ++a) add_scaled(a + 1, 1.0);
            add_scaled(j, (t - pp[j]) / (pp[j + 1] - pp[j]));
        }
    }

    double res = 0.0;
    for (std::size_t k = 0; k < m; ++k) res += (lhs[k] - rhs[k]) * (lhs[k] - rhs[k]);
    return std::sqrt(res);
}

MomentReport interp_moment_check(const Partition& p, const GridPtr& grid, std::size_t d,
                                 double q_exp, double p_exp, std::size_t n_samples,
                                 RngSpec spec) {
    if (p_exp < 1.0 || q_exp < 1.0)
        throw std::invalid_argument("moment exponents must be >= 1");
    MomentReport report;
    report.p_exp = p_exp;
    report.q_exp = q_exp;

    // One random grid pair s < t in [r,T], fixed across all samples.
    GaussianStream picker(spec, 900);
    const std::size_t lo = grid->delay_index();
    const std::size_t n_pts = grid->size();
    std::size_t ia = lo + static_cast<std::size_t>(picker.next_uniform() *
                                                   static_cast<double>(n_pts - lo - 1));
    std::size_t ib = lo + 1 +
                     static_cast<std::size_t>(picker.next_uniform() *
                                              static_cast<double>(n_pts - lo - 1));
    if (ia > ib) std::swap(ia, ib);
    if (ia == ib) ++ib;
    report.s = grid->point(ia);
    report.t = grid->point(ib);

    BoundConstants bc{p.balance_constant(), d};
    report.bound = bc.w_hat_pq(p_exp, q_exp) * std::pow(p.mesh(), -p_exp * q_exp / 2.0) *
                   std::pow(report.t - report.s, p_exp);

    McAccumulator acc;
    const auto& pts = grid->points();
    for (std::size_t i = 0; i < n_samples; ++i) {
        const GridPath w = sample_brownian(grid, d, RngSpec{spec.master_seed, i}, 7);
        const GridPath nw = interpolate(p, w);
        double integral = 0.0;
        for (std::size_t j = ia; j < ib; ++j) {
            const double dt = pts[j + 1] - pts[j];
            double speed2 = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double v = (nw.at(j + 1, c) - nw.at(j, c)) / dt;
                speed2 += v * v;
            }
            integral += std::pow(speed2, 0.5 * q_exp) * dt;
        }
        acc.add(std::pow(integral, p_exp));
    }
    report.estimate = acc.estimate();
    report.pass = report.estimate.mean + report.estimate.ci_half_width <= report.bound;
    return report;
}

double doleans_weight(const std::function<void(double, std::span<double>)>& f,
                      std::span<const std::vector<double>> cell_matrices, Shape f_shape,
                      const GridPath& w, const Partition& p) {
    const std::size_t m = f_shape.rows, d = f_shape.cols;
    if (cell_matrices.size() != p.cells())
        throw std::invalid_argument("one adapted matrix per partition cell required");
    if (w.dim() != d) throw std::invalid_argument("noise dimension mismatch");

    const auto& pts = w.grid().points();
    std::vector<double> fv(m * d), xrow(d);
    double exponent = 0.0;
    for (std::size_t j = w.grid().delay_index(); j + 1 < pts.size(); ++j) {
        const double t = pts[j];
        const double dt = pts[j + 1] - t;
        const std::size_t cell = p.locate(t).index;
        const auto& y = cell_matrices[cell];
        f(t, fv);
        double norm2 = 0.0;
        for (std::size_t l = 0; l < d; ++l) {
            double v = 0.0;
            for (std::size_t jj = 0; jj < m; ++jj) v += fv[jj * d + l] * y[jj * d + l];
            xrow[l] = v;
            norm2 += v * v;
        }
        double dot = 0.0;
        for (std::size_t l = 0; l < d; ++l) dot += xrow[l] * (w.at(j + 1, l) - w.at(j, l));
        exponent += dot - 0.5 * norm2 * dt;
    }
    if (!std::isfinite(exponent))
        throw std::overflow_error("stochastic exponential blew up");
    return std::exp(exponent);
}

GridPath girsanov_driver(const GridPath& h, const Partition& p, const GridPath& w) {
    if (h.dim() != w.dim()) throw std::invalid_argument("driver dimension mismatch");
    const TimeGrid& grid = w.grid();
    const auto& pts = grid.points();
    const std::size_t d = w.dim();
    const std::size_t k_cells = p.cells();
    std::vector<std::size_t> pidx(k_cells + 1);
    for (std::size_t i = 0; i <= k_cells; ++i) pidx[i] = grid.index_of(p.points()[i]);

    GridPath y = w;  // agrees with w on [0,r]
    for (std::size_t j = grid.delay_index(); j + 1 < pts.size(); ++j) {
        const double t = pts[j];
        const double dt = pts[j + 1] - t;
        const std::size_t cell = p.locate(t).index;
        for (std::size_t c = 0; c < d; ++c) {
            // Slope of the delayed interpolant of y over the current cell;
            // it only involves y at partition points at or before t.
            double ldot = 0.0;
            if (cell >= 1) {
                const double span = p.points()[cell + 1] - p.points()[cell];
                ldot = (y.at(pidx[cell], c) - y.at(pidx[cell - 1], c)) / span;
            }
            const double hdot = (h.at(j + 1, c) - h.at(j, c)) / dt;
            y.at(j + 1, c) = y.at(j, c) + (w.at(j + 1, c) - w.at(j, c)) -
                             (hdot - ldot) * dt;
        }
    }
    return y;
}

}  // namespace pathdep
