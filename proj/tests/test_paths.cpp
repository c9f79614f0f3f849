#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pathdep/grid.hpp"
#include "pathdep/norms.hpp"
#include "pathdep/rng.hpp"

#include <cmath>

using namespace pathdep;

namespace {

GridPath sample_function(const GridPtr& grid, double (*fn)(double)) {
    GridPath x(grid, 1);
    for (std::size_t i = 0; i < grid->size(); ++i) x.at(i, 0) = fn(grid->point(i));
    return x;
}

GridPath random_path(const GridPtr& grid, GaussianStream& rng, double amp = 1.0) {
    GridPath x(grid, 1);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double t = grid->point(i) / grid->t_end();
        x.at(i, 0) = amp * (rng.next() * 0.3 + std::sin(2.0 * M_PI * t) * rng.next_uniform());
    }
    return x;
}

}  // namespace

TEST_CASE("grid invariants") {
    const GridPtr g = TimeGrid::uniform(1.0, 8, 0.25);
    CHECK(g->size() == 9);
    CHECK(g->point(0) == 0.0);
    CHECK(g->point(8) == 1.0);
    CHECK(g->delay_index() == 2);
    CHECK(g->is_uniform());
    CHECK_THROWS_AS(TimeGrid::uniform(1.0, 7, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid::from_points({0.0, 0.5, 0.5, 1.0}), std::invalid_argument);
    CHECK(g->cell_of(0.3) == 2);
    CHECK(g->cell_of(1.0) == 7);
    CHECK(g->index_of(0.25) == 2);
}

TEST_CASE("stop at the endpoint is the identity") {
    const GridPtr g = TimeGrid::uniform(1.0, 64);
    const GridPath x = sample_function(g, [](double t) { return std::sin(3.0 * t); });
    CHECK(sup_norm(stop(x, 1.0) - x) == 0.0);
}

TEST_CASE("stop of a constant path is the same constant path") {
    const GridPtr g = TimeGrid::uniform(1.0, 32);
    const GridPath c = GridPath::constant(g, 0.7);
    const GridPath s = stop(c, 0.4);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.at(i, 0) == 0.7);
    CHECK(sup_norm(stop(c, 0.5) - c) == 0.0);  // grid stopping time keeps the grid
}

TEST_CASE("stop evaluates s ^ t pointwise with interpolation") {
    const GridPtr g = TimeGrid::uniform(1.0, 64);
    const GridPath x = sample_function(g, [](double t) { return t; });
    const GridPath stopped = stop(x, 0.5);
    for (std::size_t i = 0; i < g->size(); ++i)
        CHECK(stopped.at(i, 0) == doctest::Approx(std::min(g->point(i), 0.5)).epsilon(1e-15));
    // off-grid stopping time: interpolated freeze value, exact kink at t
    const GridPath mid = stop(x, 0.3);
    CHECK(mid.eval(0.3, 0) == doctest::Approx(0.3));
    CHECK(mid.eval(0.9, 0) == doctest::Approx(0.3));
    CHECK(mid.eval(0.2, 0) == doctest::Approx(0.2));
    CHECK_THROWS_AS(stop(x, 1.5), std::out_of_range);
}

TEST_CASE("sup norm examples") {
    const GridPtr g = TimeGrid::uniform(1.0, 1024);
    CHECK(sup_norm(GridPath::constant(g, 0.0)) == 0.0);
    CHECK(sup_norm(sample_function(g, [](double t) { return t; })) == 1.0);
    const GridPath s = sample_function(g, [](double t) { return std::sin(2.0 * M_PI * t); });
    CHECK(sup_norm(s) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("delayed Hoelder norm examples") {
    const GridPtr g = TimeGrid::uniform(1.0, 512);
    const GridPath id = sample_function(g, [](double t) { return t; });
    CHECK(holder_norm(id, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

    const GridPath root = sample_function(g, [](double t) { return std::sqrt(t); });
    const double v = holder_norm(root, 0.5);
    CHECK(v <= 1.0 + 1e-12);
    CHECK(v == doctest::Approx(1.0).epsilon(2e-2));

    const GridPath c = GridPath::constant(g, -1.25);
    CHECK(holder_norm(c, 0.5) == doctest::Approx(1.25));

    CHECK_THROWS_AS(holder_norm(id, 1.5), std::invalid_argument);
}

TEST_CASE("alpha zero falls back to the sup norm exactly") {
    const GridPtr g = TimeGrid::uniform(1.0, 128);
    const GridPath x = sample_function(g, [](double t) { return std::cos(5.0 * t); });
    CHECK(holder_norm(x, 0.0) == sup_norm(x));
}

TEST_CASE("uniform and general Hoelder quotients agree") {
    const GridPtr gu = TimeGrid::uniform(1.0, 65);
    GaussianStream rng(RngSpec{11, 0}, 0);
    const GridPath x = random_path(gu, rng);
    // same points via from_points forces the generic code path
    std::vector<double> pts = gu->points();
    pts[40] += 1e-4;  // perturb so the grid is detected as non-uniform
    const GridPtr gn = TimeGrid::from_points(pts);
    GridPath y(gn, 1);
    for (std::size_t i = 0; i < gn->size(); ++i) y.at(i, 0) = x.at(i, 0);
    CHECK(holder_quotient(x, 0.3) ==
          doctest::Approx(holder_quotient(y, 0.3)).epsilon(1e-2));
}

TEST_CASE("Cameron-Martin norm examples") {
    const GridPtr g = TimeGrid::uniform(1.0, 256);
    CHECK(cm_norm(GridPath::constant(g, 0.4)) == doctest::Approx(0.4));
    CHECK(cm_norm(sample_function(g, [](double t) { return t; })) == doctest::Approx(1.0));
    CHECK(cm_norm(sample_function(g, [](double t) { return 2.0 * t; })) ==
          doctest::Approx(2.0));
}

TEST_CASE("d_infty examples") {
    const GridPtr g = TimeGrid::uniform(1.0, 128);
    const GridPath zero = GridPath::constant(g, 0.0);
    CHECK(d_infty(0.3, zero, 0.3, zero) == 0.0);
    GridPath shifted = zero;
    for (std::size_t i = 0; i < g->size(); ++i) shifted.at(i, 0) = 0.5;
    CHECK(d_infty(0.3, shifted, 0.3, zero) == doctest::Approx(0.5));
    CHECK(d_infty(0.25, zero, 0.16, zero) == doctest::Approx(0.3));
    CHECK_THROWS_AS(d_infty(1.5, zero, 0.3, zero), std::out_of_range);
}

TEST_CASE("norm axioms under random fuzz") {
    const GridPtr g = TimeGrid::uniform(1.0, 96, 0.25);
    GaussianStream rng(RngSpec{7, 0}, 0);
    for (int it = 0; it < 50; ++it) {
        const GridPath x = random_path(g, rng, 2.0);
        const GridPath y = random_path(g, rng, 2.0);
        const double alpha = 0.5 * rng.next_uniform();
        const double lhs = holder_norm(x + y, alpha);
        CHECK(lhs <= holder_norm(x, alpha) + holder_norm(y, alpha) + 1e-10);
        GridPath sx = x;
        sx *= -1.7;
        CHECK(holder_norm(sx, alpha) ==
              doctest::Approx(1.7 * holder_norm(x, alpha)).epsilon(1e-12));
    }
}

TEST_CASE("alpha monotonicity bridged by max(1, T-r)") {
    const GridPtr g = TimeGrid::uniform(1.0, 96, 0.25);
    GaussianStream rng(RngSpec{8, 0}, 0);
    const double span = 0.75;
    for (int it = 0; it < 50; ++it) {
        const GridPath x = random_path(g, rng, 1.5);
        const double alpha = 0.1 + 0.4 * rng.next_uniform();
        const double a0 = alpha * rng.next_uniform();
        CHECK(holder_norm(x, a0) <=
              std::pow(std::max(1.0, span), alpha - a0) * holder_norm(x, alpha) + 1e-10);
    }
}

TEST_CASE("cm_norm dominates the 1/2-Hoelder norm for piecewise-linear paths") {
    const GridPtr g = TimeGrid::uniform(1.0, 128, 0.25);
    GaussianStream rng(RngSpec{9, 0}, 0);
    for (int it = 0; it < 30; ++it) {
        const GridPath x = random_path(g, rng, 1.0);
        CHECK(holder_norm(x, 0.5) <= cm_norm(x) + 1e-10);
    }
}

TEST_CASE("stop is idempotent exactly") {
    const GridPtr g = TimeGrid::uniform(1.0, 64);
    GaussianStream rng(RngSpec{10, 0}, 0);
    for (int it = 0; it < 20; ++it) {
        const GridPath x = random_path(g, rng, 1.0);
        const double t = rng.next_uniform();
        CHECK(sup_norm(stop(stop(x, t), t) - stop(x, t)) == 0.0);
    }
}

TEST_CASE("d_infty symmetry and triangle inequality") {
    const GridPtr g = TimeGrid::uniform(1.0, 64, 0.25);
    GaussianStream rng(RngSpec{12, 0}, 0);
    for (int it = 0; it < 30; ++it) {
        const GridPath x = random_path(g, rng, 1.0);
        const GridPath y = random_path(g, rng, 1.0);
        const GridPath z = random_path(g, rng, 1.0);
        const double t = 0.25 + 0.75 * rng.next_uniform();
        const double s = 0.25 + 0.75 * rng.next_uniform();
        const double u = 0.25 + 0.75 * rng.next_uniform();
        CHECK(d_infty(t, x, s, y) == doctest::Approx(d_infty(s, y, t, x)));
        CHECK(d_infty(t, x, s, y) <= d_infty(t, x, u, z) + d_infty(u, z, s, y) + 1e-10);
    }
}

TEST_CASE("path view stops and bumps without copying") {
    const GridPtr g = TimeGrid::uniform(1.0, 16);
    const GridPath x = sample_function(g, [](double t) { return t; });
    const PathView v(x, 8);  // frontier at t = 0.5
    CHECK(v.value(4, 0) == doctest::Approx(0.25));
    CHECK(v.value(12, 0) == doctest::Approx(0.5));  // frozen beyond the frontier
    const PathView b = v.with_bump(8, 0, 0.1);
    CHECK(b.value(7, 0) == doctest::Approx(0.4375));
    CHECK(b.value(8, 0) == doctest::Approx(0.6));
    CHECK(b.value(12, 0) == doctest::Approx(0.6));
}
