#include "pathdep/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pathdep {

namespace {

double point_norm(const GridPath& x, std::size_t i) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.dim(); ++c) {
        const double v = x.at(i, c);
        s += v * v;
    }
    return std::sqrt(s);
}

// sup norm of the path stopped at the delay horizon = max over points <= r.
double stopped_sup(const GridPath& x) {
    double m = 0.0;
    for (std::size_t i = 0; i <= x.grid().delay_index(); ++i)
        m = std::max(m, point_norm(x, i));
    return m;
}

double holder_quotient_uniform(const GridPath& x, double alpha) {
    const std::size_t start = x.grid().delay_index();
    const std::size_t n = x.size() - start;
    if (n < 2) return 0.0;
    const double h =
        (x.grid().t_end() - x.grid().point(start)) / static_cast<double>(n - 1);

    std::vector<double> invpow(n);
    for (std::size_t k = 1; k < n; ++k)
        invpow[k] = std::pow(static_cast<double>(k) * h, -alpha);

    double best = 0.0;
    if (x.dim() == 1) {
        const double* v = x.values().data() + start;
        double lo = v[0], hi = v[0];
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, v[i]);
            hi = std::max(hi, v[i]);
        }
        const double range = hi - lo;
        for (std::size_t k = 1; k < n; ++k) {
            double m = 0.0;
            for (std::size_t i = 0; i + k < n; ++i)
                m = std::max(m, std::abs(v[i + k] - v[i]));
            best = std::max(best, m * invpow[k]);
            // All later gaps are bounded by range * invpow[k+1].
            if (k + 1 < n && range * invpow[k + 1] <= best) break;
        }
    } else {
        for (std::size_t k = 1; k < n; ++k) {
            double msq = 0.0;
            for (std::size_t i = 0; i + k < n; ++i) {
                double s = 0.0;
                for (std::size_t c = 0; c < x.dim(); ++c) {
                    const double d = x.at(start + i + k, c) - x.at(start + i, c);
                    s += d * d;
                }
                msq = std::max(msq, s);
            }
            best = std::max(best, std::sqrt(msq) * invpow[k]);
        }
    }
    return best;
}

double holder_quotient_general(const GridPath& x, double alpha) {
    const std::size_t start = x.grid().delay_index();
    const auto& pts = x.grid().points();
    double best = 0.0;
    for (std::size_t i = start; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < x.dim(); ++c) {
                const double d = x.at(j, c) - x.at(i, c);
                s += d * d;
            }
            best = std::max(best, std::sqrt(s) * std::pow(pts[j] - pts[i], -alpha));
        }
    }
    return best;
}

}  // namespace

double sup_norm(const GridPath& x) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, point_norm(x, i));
    return m;
}

double holder_quotient(const GridPath& x, double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("alpha must lie in [0,1]");
    return x.grid().is_uniform() ? holder_quotient_uniform(x, alpha)
                                 : holder_quotient_general(x, alpha);
}

double holder_norm(const GridPath& x, double alpha) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::invalid_argument("alpha must lie in [0,1]");
    if (alpha == 0.0) return sup_norm(x);
    return stopped_sup(x) + holder_quotient(x, alpha);
}

double cm_norm(const GridPath& x) {
    const auto& pts = x.grid().points();
    double energy = 0.0;
    for (std::size_t i = x.grid().delay_index(); i + 1 < x.size(); ++i) {
        const double dt = pts[i + 1] - pts[i];
        double s = 0.0;
        for (std::size_t c = 0; c < x.dim(); ++c) {
            const double d = x.at(i + 1, c) - x.at(i, c);
            s += d * d;
        }
        energy += s / dt;
    }
    return stopped_sup(x) + std::sqrt(energy);
}

namespace {

// sup |a - b| over the union of the two breakpoint sets; exact for
// piecewise-linear paths even when the grids differ.
double sup_diff(const GridPath& a, const GridPath& b) {
    double best = 0.0;
    const auto visit = [&](double u) {
        double s = 0.0;
        for (std::size_t c = 0; c < a.dim(); ++c) {
            const double v = a.eval(u, c) - b.eval(u, c);
            s += v * v;
        }
        best = std::max(best, s);
    };
    for (double u : a.grid().points()) visit(u);
    for (double u : b.grid().points()) visit(u);
    return std::sqrt(best);
}

}  // namespace

double d_infty(double t, const GridPath& x, double s, const GridPath& y) {
    const double r = x.grid().delay();
    const double T = x.grid().t_end();
    if (t < r || t > T || s < r || s > T)
        throw std::out_of_range("d_infty times must lie in [r,T]");
    if (x.dim() != y.dim()) throw std::invalid_argument("path dimension mismatch");
    return std::sqrt(std::abs(t - s)) + sup_diff(stop(x, t), stop(y, s));
}

}  // namespace pathdep
