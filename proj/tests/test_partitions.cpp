#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pathdep/norms.hpp"
#include "pathdep/partition.hpp"
#include "pathdep/stochastics.hpp"

#include <cmath>

using namespace pathdep;

TEST_CASE("uniform partition examples") {
    const Partition p = Partition::uniform(0.0, 1.0, 4);
    REQUIRE(p.points().size() == 5);
    for (std::size_t i = 0; i <= 4; ++i)
        CHECK(p.points()[i] == doctest::Approx(0.25 * i));
    CHECK(p.balance_constant() == doctest::Approx(1.0));

    const Partition q = Partition::uniform(0.5, 1.0, 1);
    CHECK(q.points() == std::vector<double>{0.5, 1.0});

    const Partition r = Partition::uniform(0.0, 1.0, 3);
    CHECK(r.mesh() == doctest::Approx(r.min_cell()));
    CHECK(r.balance_constant() == doctest::Approx(1.0));

    CHECK_THROWS_AS(Partition::uniform(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("balance is computed, not assumed") {
    const Partition p = Partition::from_points({0.0, 0.1, 0.3, 0.6, 1.0});
    CHECK(p.mesh() == doctest::Approx(0.4));
    CHECK(p.min_cell() == doctest::Approx(0.1));
    CHECK(p.balance_constant() == doctest::Approx(4.0));
}

TEST_CASE("locate brackets and endpoints") {
    const Partition p = Partition::uniform(0.0, 1.0, 4);
    const auto mid = p.locate(0.3);
    CHECK(mid.pred == 0);
    CHECK(mid.index == 1);
    CHECK(mid.succ == 2);

    const auto left = p.locate(0.0);
    CHECK(left.pred == 0);
    CHECK(left.index == 0);
    CHECK(left.succ == 1);

    const auto right = p.locate(1.0);
    CHECK(right.pred == 3);
    CHECK(right.index == 4);
    CHECK(right.succ == 4);

    CHECK_THROWS_AS(p.locate(1.5), std::out_of_range);
}

TEST_CASE("gamma weight values") {
    const Partition p = Partition::uniform(0.0, 1.0, 8);
    CHECK(p.gamma(0.05) == 0.0);                 // before the first interior point
    CHECK(p.gamma(0.4) == doctest::Approx(1.0));  // equal adjacent cells
    CHECK(p.gamma(1.0) == doctest::Approx(1.0));  // gamma(T) = 1
    const Partition q = Partition::from_points({0.0, 0.2, 0.3, 0.55, 0.8, 1.0});
    for (double s = 0.0; s <= 1.0; s += 0.01)
        CHECK(q.gamma(s) <= q.balance_constant() + 1e-12);
}

TEST_CASE("delayed interpolation of a constant path is the same path") {
    const GridPtr g = TimeGrid::uniform(1.0, 64);
    const Partition p = Partition::uniform_on_grid(*g, 8);
    const GridPath c = GridPath::constant(g, 3.2);
    CHECK(sup_norm(interpolate(p, c) - c) == 0.0);
}

TEST_CASE("delayed interpolation shifts the identity path by one cell") {
    const GridPtr g = TimeGrid::uniform(1.0, 64);
    const Partition p = Partition::uniform_on_grid(*g, 8);
    GridPath x(g, 1);
    for (std::size_t i = 0; i < g->size(); ++i) x.at(i, 0) = g->point(i);
    const GridPath lx = interpolate(p, x);
    const double h = 0.125;
    for (std::size_t i = 0; i < g->size(); ++i) {
        const double t = g->point(i);
        const double expected = t <= h ? 0.0 : t - h;
        CHECK(lx.at(i, 0) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("interpolant passes through the lagged values") {
    const GridPtr g = TimeGrid::uniform(1.0, 128);
    const Partition p = Partition::uniform_on_grid(*g, 16);
    const GridPath w = sample_brownian(g, 1, RngSpec{21, 0});
    const GridPath lw = interpolate(p, w);
    for (std::size_t i = 0; i + 1 < p.points().size(); ++i) {
        const std::size_t gi = g->index_of(p.points()[i + 1]);
        const std::size_t prev = g->index_of(p.points()[i]);
        CHECK(lw.at(gi, 0) == doctest::Approx(w.at(prev, 0)).epsilon(1e-14));
    }
}

TEST_CASE("interpolation is linear in the path") {
    const GridPtr g = TimeGrid::uniform(1.0, 64);
    const Partition p = Partition::uniform_on_grid(*g, 8);
    const GridPath x = sample_brownian(g, 1, RngSpec{3, 1});
    const GridPath y = sample_brownian(g, 1, RngSpec{3, 2});
    GridPath ax = x;
    ax *= 1.3;
    GridPath by = y;
    by *= -0.6;
    const GridPath lhs = interpolate(p, ax + by);
    GridPath rhs = interpolate(p, x);
    rhs *= 1.3;
    GridPath ry = interpolate(p, y);
    ry *= -0.6;
    rhs += ry;
    CHECK(sup_norm(lhs - rhs) <= 1e-13);
}

TEST_CASE("stopped interpolant is bounded by lagged values") {
    const GridPtr g = TimeGrid::uniform(1.0, 128, 0.25);
    const Partition p = Partition::uniform_on_grid(*g, 12);
    const GridPath w = sample_brownian(g, 1, RngSpec{22, 0});
    const GridPath lw = interpolate(p, w);
    for (double t : {0.4, 0.7, 1.0}) {
        double bound = 0.0;
        for (std::size_t i = 0; i <= g->delay_index(); ++i)
            bound = std::max(bound, std::abs(w.at(i, 0)));
        for (double tj : p.points())
            if (tj < t && tj > p.points().front())
                bound = std::max(bound, std::abs(w.eval(tj, 0)));
        CHECK(sup_norm(stop(lw, t)) <= bound + 1e-12);
    }
}

TEST_CASE("interpolation error examples") {
    const GridPtr g = TimeGrid::uniform(1.0, 64);
    const Partition p = Partition::uniform_on_grid(*g, 8);
    CHECK(interpolation_error(p, GridPath::constant(g, 1.0), 1.0) == 0.0);

    GridPath x(g, 1);
    for (std::size_t i = 0; i < g->size(); ++i) x.at(i, 0) = g->point(i);
    CHECK(interpolation_error(p, x, 1.0) == doctest::Approx(0.125).epsilon(1e-12));
    CHECK_THROWS_AS(interpolation_error(p, x, 0.05), std::out_of_range);
}

TEST_CASE("interpolation error is within the cellwise oscillation bound") {
    const GridPtr g = TimeGrid::uniform(1.0, 256);
    const Partition p = Partition::uniform_on_grid(*g, 16);
    const GridPath w = sample_brownian(g, 1, RngSpec{23, 0});
    for (double t : {0.2, 0.5, 1.0}) {
        // brute-force right-hand side of the sup bound, per cell and in-cell time
        double rhs = 0.0;
        const GridPath wt = stop(w, t);
        for (std::size_t j = 0; j + 1 < p.points().size(); ++j) {
            if (p.points()[j] > t) break;
            const std::size_t lo = g->index_of(p.points()[j]);
            const std::size_t hi = g->index_of(p.points()[j + 1]);
            const std::size_t lag = g->index_of(p.points()[j == 0 ? 0 : j - 1]);
            for (std::size_t gi = lo; gi <= hi; ++gi) {
                const double a = std::abs(w.at(lag, 0) - wt.at(gi, 0));
                const double b = std::abs(w.at(lo, 0) - wt.at(gi, 0));
                rhs = std::max({rhs, a, b});
            }
        }
        CHECK(interpolation_error(p, w, t) <= rhs + 1e-12);
    }
}

TEST_CASE("jittered partitions respect the balance cap and stay on the grid") {
    const GridPtr g = TimeGrid::uniform(1.0, 512);
    GaussianStream rng(RngSpec{31, 0}, 0);
    for (int it = 0; it < 10; ++it) {
        const Partition p = Partition::jittered_on_grid(*g, 16, 2.0, rng);
        CHECK(p.balance_constant() <= 2.0);
        for (double t : p.points()) CHECK_NOTHROW(g->index_of(t));
    }
}

TEST_CASE("sweep validation") {
    const GridPtr g = TimeGrid::uniform(1.0, 256);
    const PartitionSweep sweep = PartitionSweep::dyadic_on_grid(*g, {8, 16, 32}, 1.5);
    CHECK(sweep.partitions.size() == 3);
    CHECK(sweep.partitions[0].mesh() > sweep.partitions[2].mesh());
    CHECK_THROWS_AS(PartitionSweep::dyadic_on_grid(*g, {16, 16}, 1.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(Partition::uniform_on_grid(*g, 7), std::invalid_argument);
}

TEST_CASE("interpolant is affine on each partition cell") {
    const GridPtr g = TimeGrid::uniform(1.0, 128);
    const Partition p = Partition::uniform_on_grid(*g, 8);
    const GridPath w = sample_brownian(g, 1, RngSpec{24, 0});
    const GridPath lw = interpolate(p, w);
    for (std::size_t j = 1; j + 1 < p.points().size(); ++j) {
        const std::size_t lo = g->index_of(p.points()[j]);
        const std::size_t hi = g->index_of(p.points()[j + 1]);
        const double slope0 = (lw.at(lo + 1, 0) - lw.at(lo, 0));
        for (std::size_t gi = lo + 1; gi < hi; ++gi)
            CHECK(lw.at(gi + 1, 0) - lw.at(gi, 0) == doctest::Approx(slope0).epsilon(1e-9));
    }
}
