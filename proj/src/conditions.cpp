#include "pathdep/conditions.hpp"

#include "pathdep/norms.hpp"

#include <algorithm>
#include <cmath>

namespace pathdep {

namespace {

constexpr std::size_t kProbeCells = 64;
constexpr double kSlack = 1e-9;  // absolute slack against pure roundoff

std::string condition_label(Condition c) {
    switch (c) {
        case Condition::C1: return "C1";
        case Condition::C2: return "C2";
        case Condition::C3: return "C3";
        case Condition::C4: return "C4";
        case Condition::C5: return "C5";
        case Condition::C6: return "C6";
        case Condition::C7: return "C7";
        default: return "C8";
    }
}

// Random paths on the probe grid: a handful of low Fourier modes plus an
// optional rough component, with amplitudes sweeping across three decades so
// growth violations at large ||x|| are actually visited.
GridPath random_path(const GridPtr& grid, std::size_t dim, GaussianStream& rng,
                     bool rough) {
    const double amp = std::pow(10.0, 3.0 * rng.next_uniform() - 1.0);
    GridPath x(grid, dim);
    const double T = grid->t_end();
    for (std::size_t c = 0; c < dim; ++c) {
        const double z0 = rng.next();
        double zs[4];
        for (double& z : zs) z = rng.next();
        for (std::size_t i = 0; i < grid->size(); ++i) {
            const double t = grid->point(i) / T;
            double v = z0;
            for (int j = 0; j < 4; ++j)
                v += zs[j] * std::sin((j + 1) * M_PI * t) / (j + 1.0);
            x.at(i, c) += amp * v;
        }
        if (rough) {
            double w = 0.0;
            for (std::size_t i = 1; i < grid->size(); ++i) {
                w += std::sqrt(grid->point(i) - grid->point(i - 1)) * rng.next();
                x.at(i, c) += 0.3 * amp * w;
            }
        }
    }
    return x;
}

double frobenius(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double diff_norm(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double l1_derivative(const GridPath& x) {
    const auto& pts = x.grid().points();
    double acc = 0.0;
    for (std::size_t i = x.grid().delay_index(); i + 1 < pts.size(); ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < x.dim(); ++c) {
            const double d = x.at(i + 1, c) - x.at(i, c);
            s += d * d;
        }
        acc += std::sqrt(s);
    }
    return acc;
}

struct Recorder {
    ConditionReport* report;
    std::size_t sample;
    void check(const std::string& inequality, double lhs, double rhs, double t) const {
        if (lhs > rhs * (1.0 + 1e-12) + kSlack)
            report->violations.push_back(ConditionViolation{inequality, lhs, rhs, t, sample});
    }
};

// Lipschitz constant of the correction term, from the declared pieces.
std::optional<double> rho_lipschitz(const CoefficientFunctional& sigma) {
    const auto& b = sigma.bounds();
    if (b.vderiv_bound && b.lip_sup && b.sup_bound && b.vderiv_lip_dinf)
        return *b.vderiv_bound * *b.lip_sup + *b.sup_bound * *b.vderiv_lip_dinf;
    return std::nullopt;
}

std::optional<double> rho_bound(const CoefficientFunctional& sigma) {
    const auto& b = sigma.bounds();
    if (b.vderiv_bound && b.sup_bound) return *b.vderiv_bound * *b.sup_bound;
    return std::nullopt;
}

}  // namespace

std::string condition_name(Condition c) { return condition_label(c); }

ConditionReport check_condition(const SdeModel& model, Condition which,
                                std::size_t samples, GaussianStream& rng,
                                const ConditionOverrides& overrides) {
    ConditionReport report;
    report.condition = condition_label(which);
    if (which == Condition::C6 || which == Condition::C7 || which == Condition::C8)
        throw std::invalid_argument("conditions C6-C8 apply to a role assignment");

    const GridPtr grid = TimeGrid::uniform(1.0, kProbeCells, 0.0);
    const std::size_t m = model.m, d = model.d;
    const auto& bb = model.drift->bounds();
    const auto& sb = model.sigma->bounds();

    std::vector<double> bx(m), by(m), sx(m * d), sy(m * d), rho_x(m);

    for (std::size_t n = 0; n < samples; ++n) {
        const Recorder rec{&report, n};
        const bool rough = which != Condition::C1 && which != Condition::C2 && (n % 2 == 1);
        const GridPath x = random_path(grid, m, rng, rough);
        const GridPath y = random_path(grid, m, rng, rough);
        const double t = grid->point(n % (grid->size() - 1));
        const PathView vx(x), vy(y);
        ++report.samples;

        switch (which) {
            case Condition::C1: {
                // Affine growth of the skeleton rhs in the derivative budget.
                std::optional<double> c0 = overrides.growth_c
                                               ? overrides.growth_c
                                               : bb.growth_c;
                std::optional<double> rb = rho_bound(*model.sigma);
                if (!c0 || !rb) {
                    report.note = "growth constants not declared; skipped";
                    return report;
                }
                model.drift->evaluate(t, vx, bx);
                correction_rho(*model.sigma, t, vx, rho_x);
                double lhs = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    const double v = bx[k] - 0.5 * rho_x[k];
                    lhs += v * v;
                }
                lhs = std::sqrt(lhs);
                const double budget = std::abs(x.at(0, 0)) + l1_derivative(x);
                const double rhs = (*c0 + 0.5 * *rb) * (1.0 + budget);
                rec.check("|b - rho/2| <= c0 (1 + |x^r| + int |x'|)", lhs, rhs, t);
                break;
            }
            case Condition::C2: {
                std::optional<double> lam = overrides.lipschitz ? overrides.lipschitz
                                                                : bb.lip_sup;
                std::optional<double> rl = rho_lipschitz(*model.sigma);
                if (!lam || !rl) {
                    report.note = "Lipschitz constants not declared; skipped";
                    return report;
                }
                model.drift->evaluate(t, vx, bx);
                model.drift->evaluate(t, vy, by);
                std::vector<double> rho_y(m);
                correction_rho(*model.sigma, t, vx, rho_x);
                correction_rho(*model.sigma, t, vy, rho_y);
                double lhs = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    const double v = (bx[k] - 0.5 * rho_x[k]) - (by[k] - 0.5 * rho_y[k]);
                    lhs += v * v;
                }
                lhs = std::sqrt(lhs);
                // sup norm is dominated by the Cameron-Martin norm on [0,T].
                const double factor = std::max(1.0, std::sqrt(grid->t_end()));
                const double rhs = (*lam + 0.5 * *rl) * factor * cm_norm(x - y);
                rec.check("|F(t,x)-F(t,y)| <= lambda ||x-y||_H", lhs, rhs, t);
                break;
            }
            case Condition::C3: {
                std::optional<double> c0 = overrides.growth_c ? overrides.growth_c
                                                              : bb.growth_c;
                const double kappa = overrides.growth_kappa.value_or(bb.growth_kappa);
                if (!c0 || !sb.growth_c) {
                    report.note = "growth constants not declared; skipped";
                    return report;
                }
                model.drift->evaluate(t, vx, bx);
                model.sigma->evaluate(t, vx, sx);
                const double xn = sup_norm(x);
                rec.check("|b(t,x)| <= c0 (1 + ||x||^kappa)", frobenius(bx),
                          *c0 * (1.0 + std::pow(xn, kappa)), t);
                rec.check("|sigma(t,x)| <= c0~ (1 + ||x||)", frobenius(sx),
                          *sb.growth_c * (1.0 + std::pow(xn, sb.growth_kappa)), t);
                break;
            }
            case Condition::C4: {
                if (!bb.lip_sup || !sb.lip_sup) {
                    report.note = "Lipschitz constants not declared; skipped";
                    return report;
                }
                const double lam = overrides.lipschitz.value_or(*bb.lip_sup);
                model.drift->evaluate(t, vx, bx);
                model.drift->evaluate(t, vy, by);
                model.sigma->evaluate(t, vx, sx);
                model.sigma->evaluate(t, vy, sy);
                const double dist = sup_norm(x - y);  // alpha_0 = 0 case
                rec.check("|b(t,x)-b(t,y)| <= lambda0 ||x-y||", diff_norm(bx, by),
                          lam * dist, t);
                rec.check("|sigma(t,x)-sigma(t,y)| <= lambda0~ ||x-y||",
                          diff_norm(sx, sy), *sb.lip_sup * dist, t);
                break;
            }
            default: {  // C5
                if (!bb.lip_sup || !sb.lip_sup) {
                    report.note = "Lipschitz constants not declared; skipped";
                    return report;
                }
                model.drift->evaluate(t, vx, bx);
                model.drift->evaluate(t, vy, by);
                model.sigma->evaluate(t, vx, sx);
                model.sigma->evaluate(t, vy, sy);
                const double lhs = diff_norm(bx, by) + diff_norm(sx, sy);
                const double rhs = (*bb.lip_sup + *sb.lip_sup) * sup_norm(x - y);
                rec.check("|b(t,x)-b(t,y)| + |sigma(t,x)-sigma(t,y)| <= lambda ||x-y||",
                          lhs, rhs, t);
                break;
            }
        }
    }
    return report;
}

ConditionReport check_condition(const RoleAssignment& roles, Condition which,
                                std::size_t samples, GaussianStream& rng,
                                const ConditionOverrides& overrides) {
    ConditionReport report;
    report.condition = condition_label(which);
    if (which != Condition::C6 && which != Condition::C7 && which != Condition::C8)
        throw std::invalid_argument("conditions C1-C5 apply to a model");

    const GridPtr grid = TimeGrid::uniform(1.0, kProbeCells, 0.0);
    const std::size_t m = roles.m, d = roles.d;
    const auto& ub = roles.b_under->bounds();
    const auto& hb = roles.b_h->bounds();
    const auto& bb = roles.b_bar->bounds();
    const auto& sb = roles.sigma->bounds();

    std::vector<double> u(m), h(m * d), bar_x(m * d), bar_y(m * d), sig_x(m * d),
        sig_y(m * d), row(m), row2(m), mat(m * m);

    if (which == Condition::C6 && !roles.b_bar->vertical_capable())
        report.violations.push_back(
            ConditionViolation{"b_bar admits vertical derivatives", 0.0, 0.0, 0.0, 0});

    for (std::size_t n = 0; n < samples; ++n) {
        const Recorder rec{&report, n};
        const GridPath x = random_path(grid, m, rng, n % 2 == 1);
        const GridPath y = random_path(grid, m, rng, n % 2 == 0);
        const double t = grid->point(n % (grid->size() - 1));
        const double s = grid->point((n / 2) % (grid->size() - 1));
        const PathView vx(x), vy(y);
        ++report.samples;

        switch (which) {
            case Condition::C6: {
                if (!ub.growth_c || !bb.sup_bound || !bb.vderiv_bound || !sb.sup_bound ||
                    !bb.deriv_growth_c) {
                    report.note = "bounds not declared; skipped";
                    return report;
                }
                const double c_growth = overrides.growth_c.value_or(
                    *ub.growth_c + hb.growth_c.value_or(hb.sup_bound.value_or(0.0)));
                const double kappa = overrides.growth_kappa.value_or(
                    std::max(ub.growth_kappa, hb.growth_kappa));
                roles.b_under->evaluate(t, vx, u);
                roles.b_h->evaluate(t, vx, h);
                const double xn = sup_norm(x);
                rec.check("|B_under| + |B_h| <= c (1 + ||x||^kappa)",
                          frobenius(u) + frobenius(h),
                          c_growth * (1.0 + std::pow(xn, kappa)), t);

                roles.b_bar->evaluate(t, vx, bar_x);
                roles.sigma->evaluate(t, vx, sig_x);
                double dsum = 0.0;
                for (std::size_t k = 0; k < m; ++k)
                    for (std::size_t l = 0; l < d; ++l) {
                        vertical_derivative(*roles.b_bar, t, vx, k, l, row);
                        for (std::size_t j = 0; j < m; ++j) dsum += row[j] * row[j];
                    }
                rec.check("|B_bar| + |d_x B_bar| + |Sigma| <= c",
                          frobenius(bar_x) + std::sqrt(dsum) + frobenius(sig_x),
                          *bb.sup_bound + *bb.vderiv_bound + *sb.sup_bound, t);

                std::vector<double> ht(m * d);
                horizontal_derivative(*roles.b_bar, t, vx, ht);
                double d2sum = 0.0;
                for (std::size_t k = 0; k < m; ++k)
                    for (std::size_t l = 0; l < d; ++l) {
                        second_vertical(*roles.b_bar, t, vx, k, l, mat);
                        for (double v : mat) d2sum += v * v;
                    }
                rec.check("|d_t B_bar| + |d_xx B_bar| <= c (1 + ||x||^eta)",
                          frobenius(ht) + std::sqrt(d2sum),
                          *bb.deriv_growth_c * (1.0 + std::pow(xn, bb.deriv_growth_eta)),
                          t);
                break;
            }
            case Condition::C7: {
                if (!ub.lip_sup && !(ub.growth_c && ub.growth_kappa == 0.0)) {
                    // Constant-per-time drift is trivially Lipschitz.
                }
                if (!bb.lip_dinf || !sb.lip_dinf || !hb.lip_dinf || !bb.vderiv_lip_dinf) {
                    report.note = "d_inf-Lipschitz constants not declared; skipped";
                    return report;
                }
                const double dist = d_infty(t, x, s, y);
                roles.b_h->evaluate(t, vx, bar_x);
                roles.b_h->evaluate(s, vy, bar_y);
                rec.check("|B_h(t,x)-B_h(s,y)| <= l d_inf", diff_norm(bar_x, bar_y),
                          *hb.lip_dinf * dist, t);
                roles.b_bar->evaluate(t, vx, bar_x);
                roles.b_bar->evaluate(s, vy, bar_y);
                rec.check("|B_bar(t,x)-B_bar(s,y)| <= l d_inf", diff_norm(bar_x, bar_y),
                          *bb.lip_dinf * dist, t);
                roles.sigma->evaluate(t, vx, sig_x);
                roles.sigma->evaluate(s, vy, sig_y);
                rec.check("|Sigma(t,x)-Sigma(s,y)| <= l d_inf", diff_norm(sig_x, sig_y),
                          *sb.lip_dinf * dist, t);
                double dd = 0.0;
                for (std::size_t k = 0; k < m; ++k)
                    for (std::size_t l = 0; l < d; ++l) {
                        vertical_derivative(*roles.b_bar, t, vx, k, l, row);
                        vertical_derivative(*roles.b_bar, s, vy, k, l, row2);
                        for (std::size_t j = 0; j < m; ++j) {
                            const double v = row[j] - row2[j];
                            dd += v * v;
                        }
                    }
                rec.check("|d_x B_bar(t,x)-d_x B_bar(s,y)| <= l d_inf", std::sqrt(dd),
                          *bb.vderiv_lip_dinf * dist, t);
                break;
            }
            default: {  // C8
                if (!roles.c8) {
                    report.note = "no scalar relation declared; skipped";
                    return report;
                }
                roles.b_bar->evaluate(t, vx, bar_x);
                roles.sigma->evaluate(t, vx, sig_x);
                double lhs = 0.0, scale = 1.0;
                for (std::size_t i = 0; i < bar_x.size(); ++i) {
                    const double v = roles.c8->b0 * bar_x[i] - roles.c8->bbar * sig_x[i];
                    lhs += v * v;
                    scale = std::max({scale, std::abs(bar_x[i]), std::abs(sig_x[i])});
                }
                rec.check("b0 B_bar = bbar Sigma", std::sqrt(lhs), 1e-12 * scale, t);
                break;
            }
        }
    }
    return report;
}

}  // namespace pathdep
