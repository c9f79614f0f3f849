#include "pathdep/functional.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pathdep {

namespace {

constexpr double kVerticalStep = 1e-5;    // first derivatives
constexpr double kVertical2Step = 1e-4;   // second derivatives
constexpr double kHorizontalStep = 1e-4;  // relative to T - t

double view_scale(const PathView& x) {
    double m = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t c = 0; c < x.dim(); ++c) m = std::max(m, std::abs(x.value(i, c)));
    return m;
}

void check_not_terminal(const CoefficientFunctional& f, double t, const PathView& x) {
    if (t >= x.grid().t_end())
        throw std::invalid_argument("derivative of " + f.name() + " undefined at t = T");
}

}  // namespace

void CoefficientFunctional::evaluate(double t, const PathView& x,
                                     std::span<double> out) const {
    if (out.size() != shape_.count()) throw std::invalid_argument("output size mismatch");
    eval_impl(t, x, out);
}

std::vector<double> CoefficientFunctional::evaluate(double t, const PathView& x) const {
    std::vector<double> out(shape_.count());
    evaluate(t, x, out);
    return out;
}

void CoefficientFunctional::vertical_derivative(double, const PathView&, std::size_t,
                                                std::size_t, std::span<double>) const {
    throw std::logic_error("no analytic vertical derivative: " + name_);
}

void CoefficientFunctional::horizontal_derivative(double, const PathView&,
                                                  std::span<double>) const {
    throw std::logic_error("no analytic horizontal derivative: " + name_);
}

void CoefficientFunctional::second_vertical(double, const PathView&, std::size_t,
                                            std::size_t, std::span<double>) const {
    throw std::logic_error("no analytic second vertical derivative: " + name_);
}

void vertical_derivative(const CoefficientFunctional& f, double t, const PathView& x,
                         std::size_t k, std::size_t l, std::span<double> out) {
    check_not_terminal(f, t, x);
    if (f.has_analytic_vertical()) {
        f.vertical_derivative(t, x, k, l, out);
        return;
    }
    if (!f.vertical_fd_ok())
        throw std::invalid_argument(f.name() + " is not vertically differentiable");
    vertical_derivative_fd(f, t, x, k, l, out);
}

void vertical_derivative_fd(const CoefficientFunctional& f, double t, const PathView& x,
                            std::size_t k, std::size_t l, std::span<double> out) {
    check_not_terminal(f, t, x);
    const std::size_t m = x.dim();
    const std::size_t from = x.grid().cell_of(t) + (x.grid().point(x.grid().cell_of(t)) >= t ? 0 : 1);
    const double eps = kVerticalStep * view_scale(x);
    const std::size_t entry = k * f.shape().cols + l;
    std::vector<double> hi(f.shape().count()), lo(f.shape().count());
    for (std::size_t j = 0; j < m; ++j) {
        f.evaluate(t, x.with_bump(from, j, eps), hi);
        f.evaluate(t, x.with_bump(from, j, -eps), lo);
        out[j] = (hi[entry] - lo[entry]) / (2.0 * eps);
    }
}

void horizontal_derivative(const CoefficientFunctional& f, double t, const PathView& x,
                           std::span<double> out) {
    check_not_terminal(f, t, x);
    if (f.has_analytic_horizontal()) {
        f.horizontal_derivative(t, x, out);
        return;
    }
    if (!f.horizontal_fd_ok())
        throw std::invalid_argument(f.name() + " is not horizontally differentiable");
    horizontal_derivative_fd(f, t, x, out);
}

void horizontal_derivative_fd(const CoefficientFunctional& f, double t,
                              const PathView& x, std::span<double> out) {
    check_not_terminal(f, t, x);
    const double T = x.grid().t_end();
    const double delta = std::max(kHorizontalStep * (T - t), 1e-8);
    if (t + delta >= T)
        throw std::invalid_argument("too close to T for a horizontal difference");
    const PathView stopped = x.stopped_at(x.grid().index_at_or_below(t));

    // One-sided difference along the stopped path; the horizontal derivative
    // is a right derivative by definition.
    std::vector<double> hi(f.shape().count()), lo(f.shape().count());
    f.evaluate(t + delta, stopped, hi);
    f.evaluate(t, stopped, lo);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (hi[i] - lo[i]) / delta;
}

void second_vertical(const CoefficientFunctional& f, double t, const PathView& x,
                     std::size_t k, std::size_t l, std::span<double> out) {
    check_not_terminal(f, t, x);
    if (f.has_analytic_second_vertical()) {
        f.second_vertical(t, x, k, l, out);
        return;
    }
    if (!f.vertical_fd_ok())
        throw std::invalid_argument(f.name() + " is not vertically differentiable");
    second_vertical_fd(f, t, x, k, l, out);
}

void second_vertical_fd(const CoefficientFunctional& f, double t, const PathView& x,
                        std::size_t k, std::size_t l, std::span<double> out) {
    check_not_terminal(f, t, x);
    const std::size_t m = x.dim();
    const std::size_t cell = x.grid().cell_of(t);
    const std::size_t from = cell + (x.grid().point(cell) >= t ? 0 : 1);
    const double eps = kVertical2Step * view_scale(x);
    const std::size_t entry = k * f.shape().cols + l;
    std::vector<double> buf(f.shape().count());
    const auto eval_entry = [&](const PathView& v) {
        f.evaluate(t, v, buf);
        return buf[entry];
    };
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            double val;
            if (a == b) {
                const double fp = eval_entry(x.with_bump(from, a, eps));
                const double f0 = eval_entry(x);
                const double fm = eval_entry(x.with_bump(from, a, -eps));
                val = (fp - 2.0 * f0 + fm) / (eps * eps);
            } else {
                const double fpp = eval_entry(x.with_bump(from, a, eps).with_bump(from, b, eps));
                const double fpm = eval_entry(x.with_bump(from, a, eps).with_bump(from, b, -eps));
                const double fmp = eval_entry(x.with_bump(from, a, -eps).with_bump(from, b, eps));
                const double fmm = eval_entry(x.with_bump(from, a, -eps).with_bump(from, b, -eps));
                val = (fpp - fpm - fmp + fmm) / (4.0 * eps * eps);
            }
            out[a * m + b] = val;
        }
    }
}

void correction_rho(const CoefficientFunctional& sigma, double t, const PathView& x,
                    std::span<double> out) {
    const Shape sh = sigma.shape();
    const std::size_t m = sh.rows, d = sh.cols;
    std::fill(out.begin(), out.end(), 0.0);
    if (t >= x.grid().t_end()) return;  // zero at the terminal time by convention
    if (!sigma.vertical_capable())
        throw std::invalid_argument(sigma.name() + " lacks vertical derivatives");

    std::vector<double> value(sh.count());
    sigma.evaluate(t, x, value);
    std::vector<double> row(m);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t l = 0; l < d; ++l) {
            vertical_derivative(sigma, t, x, k, l, row);
            double dot = 0.0;
            for (std::size_t j = 0; j < m; ++j) dot += row[j] * value[j * d + l];
            out[k] += dot;
        }
    }
}

void remainder_term(const RoleAssignment& roles, double t, const PathView& x,
                    std::span<double> out) {
    const Shape sh = roles.b_bar->shape();
    const std::size_t m = sh.rows, d = sh.cols;
    std::fill(out.begin(), out.end(), 0.0);
    if (t >= x.grid().t_end()) return;
    if (!roles.b_bar->vertical_capable())
        throw std::invalid_argument(roles.b_bar->name() + " lacks vertical derivatives");

    std::vector<double> bbar(sh.count()), sig(sh.count());
    roles.b_bar->evaluate(t, x, bbar);
    roles.sigma->evaluate(t, x, sig);
    std::vector<double> row(m);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t l = 0; l < d; ++l) {
            vertical_derivative(*roles.b_bar, t, x, k, l, row);
            double dot = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                dot += row[j] * (0.5 * bbar[j * d + l] + sig[j * d + l]);
            out[k] += dot;
        }
    }
}

namespace {

class ScaledFunctional final : public CoefficientFunctional {
public:
    ScaledFunctional(FunctionalPtr inner, double factor)
        : CoefficientFunctional(inner->shape(),
                                "scaled(" + inner->name() + ")"),
          inner_(std::move(inner)),
          factor_(factor) {
        analytic_vertical_ = inner_->has_analytic_vertical();
        analytic_horizontal_ = inner_->has_analytic_horizontal();
        analytic_second_vertical_ = inner_->has_analytic_second_vertical();
        vertical_fd_ok_ = inner_->vertical_fd_ok();
        horizontal_fd_ok_ = inner_->horizontal_fd_ok();
        const double a = std::abs(factor_);
        const DeclaredBounds& b = inner_->bounds();
        bounds_ = b;
        auto scale = [a](std::optional<double>& v) {
            if (v) *v *= a;
        };
        scale(bounds_.sup_bound);
        scale(bounds_.growth_c);
        scale(bounds_.lip_sup);
        scale(bounds_.lip_dinf);
        scale(bounds_.vderiv_bound);
        scale(bounds_.vderiv_lip_dinf);
        scale(bounds_.deriv_growth_c);
    }

    void vertical_derivative(double t, const PathView& x, std::size_t k, std::size_t l,
                             std::span<double> out) const override {
        inner_->vertical_derivative(t, x, k, l, out);
        for (double& v : out) v *= factor_;
    }
    void horizontal_derivative(double t, const PathView& x,
                               std::span<double> out) const override {
        inner_->horizontal_derivative(t, x, out);
        for (double& v : out) v *= factor_;
    }
    void second_vertical(double t, const PathView& x, std::size_t k, std::size_t l,
                         std::span<double> out) const override {
        inner_->second_vertical(t, x, k, l, out);
        for (double& v : out) v *= factor_;
    }

private:
    void eval_impl(double t, const PathView& x, std::span<double> out) const override {
        inner_->evaluate(t, x, out);
        for (double& v : out) v *= factor_;
    }

    FunctionalPtr inner_;
    double factor_;
};

class ZeroFunctional final : public CoefficientFunctional {
public:
    explicit ZeroFunctional(Shape shape) : CoefficientFunctional(shape, "zero") {
        analytic_vertical_ = analytic_horizontal_ = analytic_second_vertical_ = true;
        bounds_.sup_bound = 0.0;
        bounds_.growth_c = 0.0;
        bounds_.lip_sup = 0.0;
        bounds_.lip_dinf = 0.0;
        bounds_.vderiv_bound = 0.0;
        bounds_.vderiv_lip_dinf = 0.0;
        bounds_.deriv_growth_c = 0.0;
    }

    void vertical_derivative(double, const PathView&, std::size_t, std::size_t,
                             std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
    }
    void horizontal_derivative(double, const PathView&, std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
    }
    void second_vertical(double, const PathView&, std::size_t, std::size_t,
                         std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
    }

private:
    void eval_impl(double, const PathView&, std::span<double> out) const override {
        std::fill(out.begin(), out.end(), 0.0);
    }
};

class CorrectedDrift final : public CoefficientFunctional {
public:
    CorrectedDrift(FunctionalPtr b, FunctionalPtr sigma)
        : CoefficientFunctional(b->shape(),
                                b->name() + " - rho(" + sigma->name() + ")/2"),
          b_(std::move(b)),
          sigma_(std::move(sigma)) {
        if (!sigma_->vertical_capable())
            throw std::invalid_argument("corrected drift needs a differentiable diffusion");
        // Only evaluation is needed from the corrected drift itself.
        if (b_->bounds().growth_c && sigma_->bounds().vderiv_bound && sigma_->bounds().sup_bound) {
            bounds_.growth_c = *b_->bounds().growth_c +
                               0.5 * *sigma_->bounds().vderiv_bound * *sigma_->bounds().sup_bound;
            bounds_.growth_kappa = b_->bounds().growth_kappa;
        }
    }

private:
    void eval_impl(double t, const PathView& x, std::span<double> out) const override {
        b_->evaluate(t, x, out);
        std::vector<double> rho(out.size());
        correction_rho(*sigma_, t, x, rho);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= 0.5 * rho[i];
    }

    FunctionalPtr b_;
    FunctionalPtr sigma_;
};

}  // namespace

FunctionalPtr scale_functional(FunctionalPtr f, double factor) {
    return std::make_shared<ScaledFunctional>(std::move(f), factor);
}

FunctionalPtr zero_functional(Shape shape) {
    return std::make_shared<ZeroFunctional>(shape);
}

FunctionalPtr drift_minus_half_rho(FunctionalPtr b, FunctionalPtr sigma) {
    return std::make_shared<CorrectedDrift>(std::move(b), std::move(sigma));
}

}  // namespace pathdep
