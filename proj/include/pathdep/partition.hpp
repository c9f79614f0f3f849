#pragma once

#include "pathdep/grid.hpp"
#include "pathdep/rng.hpp"

#include <cstddef>
#include <vector>

namespace pathdep {

// Balanced partition r = t_0 < ... < t_k = T of the post-delay interval.
// The balance constant (mesh over smallest cell) is computed, not assumed.
class Partition {
public:
    static Partition uniform(double r, double t_end, std::size_t cells);
    static Partition from_points(std::vector<double> points);
    // Coarsenings of a master grid; every partition point is a grid point, so
    // interpolation along the partition is exact on the grid.
    static Partition uniform_on_grid(const TimeGrid& grid, std::size_t cells);
    static Partition jittered_on_grid(const TimeGrid& grid, std::size_t cells,
                                      double balance_cap, GaussianStream& rng);

    const std::vector<double>& points() const { return points_; }
    std::size_t cells() const { return points_.size() - 1; }
    double r() const { return points_.front(); }
    double t_end() const { return points_.back(); }
    double mesh() const { return mesh_; }
    double min_cell() const { return min_cell_; }
    double balance_constant() const { return mesh_ / min_cell_; }

    // Predecessor / current / successor partition indices around t: for
    // t in [t_i, t_{i+1}) these are ((i-1) v 0, i, i+1); at t = T they are
    // (k-1, k, k).
    struct Bracket {
        std::size_t pred, index, succ;
    };
    Bracket locate(double t) const;

    // Backward cell length t_i - t_{(i-1) v 0}; zero at i = 0.
    double delta(std::size_t i) const;

    // Cell-ratio weight: delta(index)/delta(succ) around s. Vanishes before
    // the first interior point, equals 1 at T, stays within [0, balance].
    double gamma(double s) const;

private:
    explicit Partition(std::vector<double> points);

    std::vector<double> points_;
    double mesh_;
    double min_cell_;
};

// Partitions with strictly decreasing mesh and a common balance cap.
struct PartitionSweep {
    std::vector<Partition> partitions;

    static PartitionSweep dyadic_on_grid(const TimeGrid& grid,
                                         const std::vector<std::size_t>& cells,
                                         double balance_cap);
    static PartitionSweep jittered_on_grid(const TimeGrid& grid,
                                           const std::vector<std::size_t>& cells,
                                           double balance_cap, GaussianStream& rng);
    void validate(double balance_cap) const;
};

// Delayed linear interpolation of x along the partition: frozen at x(r ^ t)
// up to the first interior point, then piecewise linear with a one-cell lag
// (the segment over cell i+1 interpolates the values at t_{i-1} and t_i), so
// the interpolant at time t uses only values observed strictly before t.
GridPath interpolate(const Partition& p, const GridPath& x);

// sup-norm distance between the stopped interpolant and the stopped path.
double interpolation_error(const Partition& p, const GridPath& x, double t);

}  // namespace pathdep
