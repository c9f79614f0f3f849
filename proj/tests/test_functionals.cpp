#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pathdep/conditions.hpp"
#include "pathdep/functional.hpp"
#include "pathdep/norms.hpp"
#include "pathdep/registry.hpp"
#include "pathdep/rng.hpp"
#include "pathdep/solver.hpp"

#include <cmath>

using namespace pathdep;

namespace {

GridPath smooth_path(const GridPtr& grid, GaussianStream& rng, double amp = 1.0) {
    GridPath x(grid, 1);
    const double z0 = rng.next();
    double zs[3];
    for (double& z : zs) z = rng.next();
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double t = grid->point(i);
        double v = z0;
        for (int j = 0; j < 3; ++j) v += zs[j] * std::sin((j + 1) * M_PI * t) / (j + 1.0);
        x.at(i, 0) = amp * v;
    }
    return x;
}

}  // namespace

TEST_CASE("registry families evaluate as documented") {
    const GridPtr g = TimeGrid::uniform(1.0, 64);
    GridPath x(g, 1);
    for (std::size_t i = 0; i < g->size(); ++i) x.at(i, 0) = g->point(i);  // x(t) = t
    const PathView v(x);

    CHECK(make_functional("constant(0.5)", Shape{1, 1})->evaluate(0.25, v)[0] == 0.5);
    CHECK(make_functional("linear(scale=2)", Shape{1, 1})->evaluate(0.25, v)[0] ==
          doctest::Approx(0.5));
    CHECK(make_functional("tanh(scale=0.8, gain=1)", Shape{1, 1})->evaluate(0.5, v)[0] ==
          doctest::Approx(0.8 * std::tanh(0.5)));
    CHECK(make_functional("sin(scale=1, gain=2)", Shape{1, 1})->evaluate(0.5, v)[0] ==
          doctest::Approx(std::sin(1.0)));
    // integral of t over [0, 0.5); left-point reading of the grid path
    const double h = 1.0 / 64.0;
    CHECK(make_functional("integral(inner=linear)", Shape{1, 1})->evaluate(0.5, v)[0] ==
          doctest::Approx(h * h * (31.0 * 32.0 / 2.0)).epsilon(1e-12));
    CHECK(make_functional("delayed(tau=0.25, inner=linear)", Shape{1, 1})
              ->evaluate(0.5, v)[0] == doctest::Approx(0.25));
    GridPath dip = x;
    dip.at(10, 0) = -2.0;
    CHECK(make_functional("running_sup(scale=1)", Shape{1, 1})
              ->evaluate(0.5, PathView(dip))[0] == doctest::Approx(2.0));
    CHECK_THROWS_AS(make_functional("mystery(1)", Shape{1, 1}), std::invalid_argument);
}

TEST_CASE("built-ins are non-anticipative under random fuzz") {
    const GridPtr g = TimeGrid::uniform(1.0, 64);
    GaussianStream rng(RngSpec{41, 0}, 0);
    const std::vector<std::string> specs = {
        "constant(0.3)",  "linear(scale=1)",          "tanh(scale=0.8, gain=2)",
        "sin(scale=2, gain=1)", "integral(inner=tanh)", "delayed(tau=0.2, inner=tanh)",
        "running_sup(scale=1)"};
    for (const auto& spec : specs) {
        const FunctionalPtr f = make_functional(spec, Shape{1, 1});
        for (int it = 0; it < 12; ++it) {
            const GridPath x = smooth_path(g, rng, 1.5);
            const std::size_t ti = 1 + static_cast<std::size_t>(rng.next_uniform() * 62);
            const double t = g->point(ti);
            const GridPath xt = stop(x, t);
            const double a = f->evaluate(t, PathView(x))[0];
            const double b = f->evaluate(t, PathView(xt))[0];
            CHECK(a == doctest::Approx(b).epsilon(1e-14));
            // equivalently through the view frontier
            const double c = f->evaluate(t, PathView(x, ti))[0];
            CHECK(a == doctest::Approx(c).epsilon(1e-14));
        }
    }
}

TEST_CASE("vertical derivative examples") {
    const GridPtr g = TimeGrid::uniform(1.0, 64);
    GaussianStream rng(RngSpec{42, 0}, 0);
    const GridPath x = smooth_path(g, rng);
    const PathView v(x);
    double out[1];

    const FunctionalPtr c = make_functional("constant(1.5)", Shape{1, 1});
    vertical_derivative(*c, 0.5, v, 0, 0, out);
    CHECK(out[0] == 0.0);

    const FunctionalPtr th = make_functional("tanh(scale=1, gain=1)", Shape{1, 1});
    vertical_derivative(*th, 0.5, v, 0, 0, out);
    const double expect = 1.0 - std::tanh(x.eval(0.5, 0)) * std::tanh(x.eval(0.5, 0));
    CHECK(out[0] == doctest::Approx(expect).epsilon(1e-12));
    double fd[1];
    vertical_derivative_fd(*th, 0.5, v, 0, 0, fd);
    CHECK(out[0] == doctest::Approx(fd[0]).epsilon(1e-6));

    const FunctionalPtr integ = make_functional("integral(inner=tanh)", Shape{1, 1});
    vertical_derivative(*integ, 0.5, v, 0, 0, out);
    CHECK(out[0] == 0.0);
    vertical_derivative_fd(*integ, 0.5, v, 0, 0, fd);
    CHECK(std::abs(fd[0]) <= 1e-10);

    CHECK_THROWS_AS(vertical_derivative(*th, 1.0, v, 0, 0, out), std::invalid_argument);
}

TEST_CASE("horizontal derivative examples") {
    const GridPtr g = TimeGrid::uniform(1.0, 64);
    GaussianStream rng(RngSpec{43, 0}, 0);
    const GridPath x = smooth_path(g, rng);
    const PathView v(x);
    double out[1];

    const FunctionalPtr sup = make_functional("running_sup(scale=1)", Shape{1, 1});
    horizontal_derivative(*sup, 0.5, v, out);
    CHECK(out[0] == 0.0);

    const FunctionalPtr integ = make_functional("integral(inner=tanh)", Shape{1, 1});
    horizontal_derivative(*integ, 0.5, v, out);
    CHECK(out[0] == doctest::Approx(std::tanh(x.eval(0.5, 0))).epsilon(1e-9));

    const FunctionalPtr c = make_functional("constant(2)", Shape{1, 1});
    horizontal_derivative(*c, 0.5, v, out);
    CHECK(out[0] == 0.0);

    const FunctionalPtr del = make_functional("delayed(tau=0.2, inner=tanh)", Shape{1, 1});
    CHECK_THROWS_AS(horizontal_derivative(*del, 0.5, v, out), std::invalid_argument);
}

TEST_CASE("delayed map has zero vertical derivative after the start") {
    const GridPtr g = TimeGrid::uniform(1.0, 64);
    GaussianStream rng(RngSpec{44, 0}, 0);
    const GridPath x = smooth_path(g, rng);
    double fd[1];
    const FunctionalPtr del = make_functional("delayed(tau=0.2, inner=tanh)", Shape{1, 1});
    vertical_derivative(*del, 0.5, PathView(x), 0, 0, fd);
    CHECK(fd[0] == 0.0);
}

TEST_CASE("running sup refuses vertical differentiation") {
    const GridPtr g = TimeGrid::uniform(1.0, 32);
    const GridPath x = GridPath::constant(g, 1.0);
    double out[1];
    const FunctionalPtr sup = make_functional("running_sup(scale=1)", Shape{1, 1});
    CHECK_THROWS_AS(vertical_derivative(*sup, 0.5, PathView(x), 0, 0, out),
                    std::invalid_argument);
}

TEST_CASE("analytic and finite-difference derivatives agree on smooth families") {
    const GridPtr g = TimeGrid::uniform(1.0, 128);
    GaussianStream rng(RngSpec{45, 0}, 0);
    const std::vector<std::string> specs = {"tanh(scale=0.8, gain=1.3)",
                                            "sin(scale=0.5, gain=2)", "linear(scale=1.1)",
                                            "integral(inner=sin, scale=1, gain=1)"};
    for (const auto& spec : specs) {
        const FunctionalPtr f = make_functional(spec, Shape{1, 1});
        for (int it = 0; it < 10; ++it) {
            const GridPath x = smooth_path(g, rng, 1.2);
            const PathView v(x);
            const std::size_t ti = 1 + static_cast<std::size_t>(rng.next_uniform() * 120);
            const double t = g->point(ti);
            double a[1], b[1];
            vertical_derivative(*f, t, v, 0, 0, a);
            vertical_derivative_fd(*f, t, v, 0, 0, b);
            CHECK(std::abs(a[0] - b[0]) <= 1e-5 * std::max(1.0, std::abs(a[0])));
            horizontal_derivative(*f, t, v, a);
            horizontal_derivative_fd(*f, t, v, b);
            CHECK(std::abs(a[0] - b[0]) <= 1e-5 * std::max(1.0, std::abs(a[0])));
            second_vertical(*f, t, v, 0, 0, a);
            second_vertical_fd(*f, t, v, 0, 0, b);
            CHECK(std::abs(a[0] - b[0]) <= 1e-5 * std::max(1.0, std::abs(a[0])));
        }
    }
}

TEST_CASE("second vertical derivative is symmetric for smooth families") {
    // two-dimensional state so the mixed partials are nontrivial
    const GridPtr g = TimeGrid::uniform(1.0, 64);
    GaussianStream rng(RngSpec{46, 0}, 0);
    GridPath x(g, 2);
    for (std::size_t i = 0; i < g->size(); ++i) {
        x.at(i, 0) = std::sin(3.0 * g->point(i));
        x.at(i, 1) = std::cos(2.0 * g->point(i));
    }
    const FunctionalPtr f = make_functional("tanh(scale=1, gain=1)", Shape{2, 1});
    double mat[4];
    second_vertical(*f, 0.5, PathView(x), 0, 0, mat);
    CHECK(mat[1] == doctest::Approx(mat[2]).epsilon(1e-9));
    double fd[4];
    second_vertical_fd(*f, 0.5, PathView(x), 0, 0, fd);
    CHECK(fd[1] == doctest::Approx(fd[2]).epsilon(1e-5));
}

TEST_CASE("running sup is Hoelder in the pseudometric") {
    const GridPtr g = TimeGrid::uniform(1.0, 64, 0.0);
    GaussianStream rng(RngSpec{47, 0}, 0);
    const FunctionalPtr sup = make_functional("running_sup(scale=1)", Shape{1, 1});
    for (int it = 0; it < 30; ++it) {
        const GridPath x = smooth_path(g, rng, 1.0);
        const GridPath y = smooth_path(g, rng, 1.0);
        const double t = g->point(1 + (it * 2) % 62);
        const double s = g->point(1 + (it * 3) % 62);
        const double lhs = std::abs(sup->evaluate(t, PathView(x))[0] -
                                    sup->evaluate(s, PathView(y))[0]);
        const GridPath xt = stop(x, t);
        const GridPath ys = stop(y, s);
        CHECK(lhs <= sup_norm(xt - ys) + 1e-12);
    }
}

TEST_CASE("correction term examples") {
    const GridPtr g = TimeGrid::uniform(1.0, 64);
    GaussianStream rng(RngSpec{48, 0}, 0);
    const GridPath x = smooth_path(g, rng);
    double rho[1];

    correction_rho(*make_functional("constant(2)", Shape{1, 1}), 0.5, PathView(x), rho);
    CHECK(rho[0] == 0.0);

    const FunctionalPtr th = make_functional("tanh(scale=1, gain=1)", Shape{1, 1});
    correction_rho(*th, 0.5, PathView(x), rho);
    const double v = std::tanh(x.eval(0.5, 0));
    CHECK(rho[0] == doctest::Approx((1.0 - v * v) * v).epsilon(1e-12));

    correction_rho(*th, 1.0, PathView(x), rho);  // zero at the terminal time
    CHECK(rho[0] == 0.0);

    CHECK_THROWS_AS(
        correction_rho(*make_functional("running_sup(scale=1)", Shape{1, 1}), 0.5,
                       PathView(x), rho),
        std::invalid_argument);
}

TEST_CASE("remainder term under the presets") {
    const GridPtr g = TimeGrid::uniform(1.0, 64);
    GaussianStream rng(RngSpec{49, 0}, 0);
    const GridPath x = smooth_path(g, rng);

    SdeModel model;
    model.drift = make_functional("constant(0)", Shape{1, 1});
    model.sigma = make_functional("tanh(scale=0.8, gain=1)", Shape{1, 1});
    model.initial_segment = InitialSegment::constant(0.2);

    double rho[1], rem[1];
    correction_rho(*model.sigma, 0.5, PathView(x), rho);

    remainder_term(forward_roles(model), 0.5, PathView(x), rem);
    CHECK(rem[0] == doctest::Approx(0.5 * rho[0]).epsilon(1e-12));

    remainder_term(reverse_roles(model), 0.5, PathView(x), rem);
    CHECK(rem[0] == doctest::Approx(-0.5 * rho[0]).epsilon(1e-12));

    RoleAssignment constant_bar = forward_roles(model);
    constant_bar.b_bar = make_functional("constant(1.4)", Shape{1, 1});
    remainder_term(constant_bar, 0.5, PathView(x), rem);
    CHECK(rem[0] == 0.0);

    remainder_term(forward_roles(model), 1.0, PathView(x), rem);
    CHECK(rem[0] == 0.0);
}

TEST_CASE("condition checks accept compliant models") {
    SdeModel model;
    model.m = model.d = 1;
    model.drift = make_functional("constant(0)", Shape{1, 1});
    model.sigma = make_functional("tanh(scale=0.8, gain=1)", Shape{1, 1});
    model.initial_segment = InitialSegment::constant(0.2);

    GaussianStream rng(RngSpec{50, 0}, 0);
    for (Condition c : {Condition::C1, Condition::C2, Condition::C3, Condition::C4,
                        Condition::C5}) {
        const ConditionReport rep = check_condition(model, c, 60, rng);
        CHECK(rep.passed());
    }
    for (Condition c : {Condition::C6, Condition::C7, Condition::C8}) {
        const ConditionReport fwd = check_condition(forward_roles(model), c, 40, rng);
        CHECK(fwd.passed());
        const ConditionReport rev = check_condition(reverse_roles(model), c, 40, rng);
        CHECK(rev.passed());
    }
}

TEST_CASE("linear drift with declared sublinear growth is flagged") {
    SdeModel model;
    model.m = model.d = 1;
    model.drift = make_functional("linear(scale=1)", Shape{1, 1});
    model.sigma = make_functional("constant(1)", Shape{1, 1});
    model.initial_segment = InitialSegment::constant(0.0);

    GaussianStream rng(RngSpec{51, 0}, 0);
    ConditionOverrides overrides;
    overrides.growth_c = 1.0;
    overrides.growth_kappa = 0.5;  // too optimistic for |x(t)|
    const ConditionReport rep = check_condition(model, Condition::C3, 200, rng, overrides);
    CHECK_FALSE(rep.passed());
    CHECK(rep.violations.front().lhs > rep.violations.front().rhs);
}

TEST_CASE("reverse preset satisfies the scalar relation exactly") {
    SdeModel model;
    model.m = model.d = 1;
    model.drift = make_functional("constant(0)", Shape{1, 1});
    model.sigma = make_functional("tanh(scale=0.8, gain=1)", Shape{1, 1});
    model.initial_segment = InitialSegment::constant(0.2);
    const RoleAssignment roles = reverse_roles(model);
    REQUIRE(roles.c8.has_value());
    CHECK(roles.c8->b0 == 1.0);
    CHECK(roles.c8->bbar == -1.0);
    GaussianStream rng(RngSpec{52, 0}, 0);
    CHECK(check_condition(roles, Condition::C8, 50, rng).passed());
}
