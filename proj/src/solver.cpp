#include "pathdep/solver.hpp"

#include "pathdep/norms.hpp"

#include <algorithm>
#include <cmath>

namespace pathdep {

namespace {

constexpr double kDivergenceGuard = 1e8;

void check_finite_point(const GridPath& x, std::size_t i, const char* what) {
    for (std::size_t c = 0; c < x.dim(); ++c) {
        const double v = x.at(i, c);
        if (!std::isfinite(v) || std::abs(v) > kDivergenceGuard)
            throw SolverDivergence(std::string(what) + ": state exceeded the growth guard");
    }
}

// Writes x_hat(r ^ t) onto the grid.
GridPath initial_path(const InitialSegment& x_hat, const GridPtr& grid) {
    GridPath x(grid, x_hat.dim);
    const double r = grid->delay();
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double t = std::min(grid->point(i), r);
        for (std::size_t c = 0; c < x_hat.dim; ++c) x.at(i, c) = x_hat.eval(t, c);
    }
    return x;
}

// Cellwise forward difference quotients of a path, one d-vector per cell.
std::vector<double> cell_slopes(const GridPath& h) {
    const auto& pts = h.grid().points();
    std::vector<double> out((pts.size() - 1) * h.dim());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double dt = pts[i + 1] - pts[i];
        for (std::size_t c = 0; c < h.dim(); ++c)
            out[i * h.dim() + c] = (h.at(i + 1, c) - h.at(i, c)) / dt;
    }
    return out;
}

// One pass of the shared stepping rule:
//   X_{j+1} = X_j + b(t_j, z^{t_j}) dt + sigma(t_j, z^{t_j}) dW_j.
// Passing z = X gives the Euler scheme, passing the previous iterate gives
// the Picard map; the fixed point of the latter is the former.
void sde_steps(GridPath& x, const GridPath& source, const SdeModel& model,
               const GridPath& w) {
    const TimeGrid& grid = x.grid();
    const std::size_t m = model.m, d = model.d;
    std::vector<double> b(m), sig(m * d);
    for (std::size_t j = grid.delay_index(); j + 1 < grid.size(); ++j) {
        const double t = grid.point(j);
        const double dt = grid.point(j + 1) - t;
        const PathView z(source, j);
        model.drift->evaluate(t, z, b);
        model.sigma->evaluate(t, z, sig);
        for (std::size_t k = 0; k < m; ++k) {
            double v = x.at(j, k) + b[k] * dt;
            for (std::size_t l = 0; l < d; ++l)
                v += sig[k * d + l] * (w.at(j + 1, l) - w.at(j, l));
            x.at(j + 1, k) = v;
        }
        check_finite_point(x, j + 1, "sde step");
    }
}

// Right-hand side of the skeleton ODE for a fixed sampled driver.
class SkeletonRhs final : public CoefficientFunctional {
public:
    SkeletonRhs(const SdeModel& model, const GridPath& h)
        : CoefficientFunctional(Shape{model.m, 1}, "skeleton rhs"),
          model_(&model),
          hdot_(cell_slopes(h)),
          grid_(&h.grid()),
          d_(model.d) {}

private:
    void eval_impl(double t, const PathView& x, std::span<double> out) const override {
        const std::size_t m = shape_.rows;
        std::vector<double> b(m), rho(m), sig(m * d_);
        model_->drift->evaluate(t, x, b);
        correction_rho(*model_->sigma, t, x, rho);
        model_->sigma->evaluate(t, x, sig);
        const std::size_t cell = grid_->cell_of(t);
        for (std::size_t k = 0; k < m; ++k) {
            double v = b[k] - 0.5 * rho[k];
            for (std::size_t l = 0; l < d_; ++l)
                v += sig[k * d_ + l] * hdot_[cell * d_ + l];
            out[k] = v;
        }
    }

    const SdeModel* model_;
    std::vector<double> hdot_;
    const TimeGrid* grid_;
    std::size_t d_;
};

}  // namespace

InitialSegment InitialSegment::constant(std::span<const double> value, double r) {
    InitialSegment seg;
    seg.dim = value.size();
    seg.times = {0.0};
    seg.values.assign(value.begin(), value.end());
    if (r > 0.0) {
        seg.times.push_back(r);
        seg.values.insert(seg.values.end(), value.begin(), value.end());
    }
    return seg;
}

InitialSegment InitialSegment::constant(double value, double r) {
    const double v[1] = {value};
    return constant(std::span<const double>(v, 1), r);
}

double InitialSegment::eval(double t, std::size_t c) const {
    if (t <= times.front()) return values[c];
    if (t >= times.back()) return values[(times.size() - 1) * dim + c];
    std::size_t i = 0;
    while (i + 1 < times.size() && times[i + 1] <= t) ++i;
    if (times[i + 1] == times[i]) return values[i * dim + c];
    const double w = (t - times[i]) / (times[i + 1] - times[i]);
    return (1.0 - w) * values[i * dim + c] + w * values[(i + 1) * dim + c];
}

SolveReport solve_mild_ode(const CoefficientFunctional& rhs, const InitialSegment& x_hat,
                           GridPtr grid, double tol, std::size_t max_iter) {
    const std::size_t m = rhs.shape().rows;
    if (rhs.shape().cols != 1) throw std::invalid_argument("ODE rhs must be a vector");
    GridPath x0 = initial_path(x_hat, grid);
    SolveReport report{x0, 0, {}, false};

    GridPath cur = x0;
    std::vector<double> f(m);
    for (std::size_t it = 0; it < max_iter; ++it) {
        GridPath next = x0;
        const PathView z(cur);
        std::vector<double> acc(m, 0.0);
        for (std::size_t j = grid->delay_index(); j + 1 < grid->size(); ++j) {
            const double t = grid->point(j);
            const double dt = grid->point(j + 1) - t;
            rhs.evaluate(t, z, f);
            for (std::size_t k = 0; k < m; ++k) {
                acc[k] += f[k] * dt;
                next.at(j + 1, k) = x0.at(j + 1, k) + acc[k];
            }
            check_finite_point(next, j + 1, "mild ode");
        }
        const double dist = cm_norm(next - cur);
        report.successive_distances.push_back(dist);
        report.iterations = it + 1;
        cur = std::move(next);
        if (dist < tol) {
            report.converged = true;
            break;
        }
    }
    report.solution = std::move(cur);
    if (!report.converged)
        throw NonConvergence("mild ODE Picard iteration did not reach tolerance");
    return report;
}

SolveReport skeleton(const SdeModel& model, const GridPath& h, GridPtr grid, double tol,
                     std::size_t max_iter) {
    const SkeletonRhs rhs(model, h);
    return solve_mild_ode(rhs, model.initial_segment, std::move(grid), tol, max_iter);
}

GridPath euler_sde(const SdeModel& model, const GridPath& w) {
    if (w.dim() != model.d) throw std::invalid_argument("driving path dimension mismatch");
    GridPath x = initial_path(model.initial_segment, w.grid_ptr());
    sde_steps(x, x, model, w);
    return x;
}

SolveReport picard_sde(const SdeModel& model, const GridPath& w, double tol,
                       std::size_t max_iter) {
    if (w.dim() != model.d) throw std::invalid_argument("driving path dimension mismatch");
    GridPath x0 = initial_path(model.initial_segment, w.grid_ptr());
    SolveReport report{x0, 0, {}, false};

    GridPath cur = x0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        GridPath next = x0;
        sde_steps(next, cur, model, w);
        const double dist = sup_norm(next - cur);
        report.successive_distances.push_back(dist);
        report.iterations = it + 1;
        cur = std::move(next);
        if (dist < tol) {
            report.converged = true;
            break;
        }
    }
    report.solution = std::move(cur);
    if (!report.converged)
        throw NonConvergence("SDE Picard iteration did not reach tolerance");
    return report;
}

GridPath sequence_sde(const RoleAssignment& roles, const InitialSegment& x_hat,
                      const GridPath& h, const Partition& p, const GridPath& w) {
    const GridPtr grid = w.grid_ptr();
    const std::size_t m = roles.m, d = roles.d;
    const GridPath nw = interpolate(p, w);
    const std::vector<double> nwdot = cell_slopes(nw);
    const std::vector<double> hdot = cell_slopes(h);

    GridPath y = initial_path(x_hat, grid);
    std::vector<double> bu(m), bh(m * d), bb(m * d), sg(m * d);
    for (std::size_t j = grid->delay_index(); j + 1 < grid->size(); ++j) {
        const double t = grid->point(j);
        const double dt = grid->point(j + 1) - t;
        const PathView z(y, j);
        roles.b_under->evaluate(t, z, bu);
        roles.b_bar->evaluate(t, z, bb);
        roles.sigma->evaluate(t, z, sg);
        bool h_live = false;
        for (std::size_t l = 0; l < d; ++l) h_live |= hdot[j * d + l] != 0.0;
        if (h_live) roles.b_h->evaluate(t, z, bh);
        for (std::size_t k = 0; k < m; ++k) {
            double drift = bu[k];
            for (std::size_t l = 0; l < d; ++l) {
                if (h_live) drift += bh[k * d + l] * hdot[j * d + l];
                drift += bb[k * d + l] * nwdot[j * d + l];
            }
            double v = y.at(j, k) + drift * dt;
            for (std::size_t l = 0; l < d; ++l)
                v += sg[k * d + l] * (w.at(j + 1, l) - w.at(j, l));
            y.at(j + 1, k) = v;
        }
        check_finite_point(y, j + 1, "sequence sde");
    }
    return y;
}

GridPath limit_sde(const RoleAssignment& roles, const InitialSegment& x_hat,
                   const GridPath& h, const GridPath& w) {
    const GridPtr grid = w.grid_ptr();
    const std::size_t m = roles.m, d = roles.d;
    const std::vector<double> hdot = cell_slopes(h);

    GridPath y = initial_path(x_hat, grid);
    std::vector<double> bu(m), rem(m), bh(m * d), bb(m * d), sg(m * d);
    for (std::size_t j = grid->delay_index(); j + 1 < grid->size(); ++j) {
        const double t = grid->point(j);
        const double dt = grid->point(j + 1) - t;
        const PathView z(y, j);
        roles.b_under->evaluate(t, z, bu);
        remainder_term(roles, t, z, rem);
        roles.b_bar->evaluate(t, z, bb);
        roles.sigma->evaluate(t, z, sg);
        bool h_live = false;
        for (std::size_t l = 0; l < d; ++l) h_live |= hdot[j * d + l] != 0.0;
        if (h_live) roles.b_h->evaluate(t, z, bh);
        for (std::size_t k = 0; k < m; ++k) {
            double drift = bu[k] + rem[k];
            if (h_live)
                for (std::size_t l = 0; l < d; ++l) drift += bh[k * d + l] * hdot[j * d + l];
            double v = y.at(j, k) + drift * dt;
            for (std::size_t l = 0; l < d; ++l)
                v += (bb[k * d + l] + sg[k * d + l]) * (w.at(j + 1, l) - w.at(j, l));
            y.at(j + 1, k) = v;
        }
        check_finite_point(y, j + 1, "limit sde");
    }
    return y;
}

RoleAssignment forward_roles(const SdeModel& model) {
    RoleAssignment roles;
    roles.m = model.m;
    roles.d = model.d;
    roles.b_under = drift_minus_half_rho(model.drift, model.sigma);
    roles.b_h = zero_functional(Shape{model.m, model.d});
    roles.b_bar = model.sigma;
    roles.sigma = zero_functional(Shape{model.m, model.d});
    roles.c8 = RoleAssignment::C8Scalars{0.0, 0.0};
    return roles;
}

RoleAssignment reverse_roles(const SdeModel& model) {
    RoleAssignment roles;
    roles.m = model.m;
    roles.d = model.d;
    roles.b_under = model.drift;
    roles.b_h = model.sigma;
    roles.b_bar = scale_functional(model.sigma, -1.0);
    roles.sigma = model.sigma;
    roles.c8 = RoleAssignment::C8Scalars{1.0, -1.0};
    return roles;
}

}  // namespace pathdep
