#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace pathdep {

// Time grid on [0,T] with a delay horizon r. The grid always contains 0, r
// and T; all paths, solvers and norms work on the sampled skeleton.
class TimeGrid {
public:
    static std::shared_ptr<const TimeGrid> uniform(double t_end, std::size_t cells,
                                                   double delay = 0.0);
    static std::shared_ptr<const TimeGrid> from_points(std::vector<double> points,
                                                       double delay = 0.0);

    double t_end() const { return points_.back(); }
    double delay() const { return delay_; }
    const std::vector<double>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    std::size_t cells() const { return points_.size() - 1; }
    std::size_t delay_index() const { return delay_index_; }
    double point(std::size_t i) const { return points_[i]; }

    bool is_uniform() const { return uniform_; }
    // Cell width for uniform grids; mesh of the grid otherwise.
    double spacing() const { return spacing_; }

    // Index i with t in [points[i], points[i+1]); returns cells()-1 at t = T.
    std::size_t cell_of(double t) const;
    // Largest index with points[index] <= t.
    std::size_t index_at_or_below(double t) const;
    // Index of a point equal to t (within tol); throws if t is off-grid.
    std::size_t index_of(double t, double tol = 1e-12) const;

private:
    TimeGrid(std::vector<double> points, double delay);

    std::vector<double> points_;
    double delay_;
    std::size_t delay_index_;
    bool uniform_;
    double spacing_;
};

using GridPtr = std::shared_ptr<const TimeGrid>;

// A continuous path sampled on a grid; values are read back off-grid by
// linear interpolation. Immutable in spirit: operations return new paths.
class GridPath {
public:
    GridPath(GridPtr grid, std::size_t dim);
    static GridPath constant(GridPtr grid, std::span<const double> value);
    static GridPath constant(GridPtr grid, double value);

    const TimeGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return grid_->size(); }

    double at(std::size_t i, std::size_t c) const { return values_[i * dim_ + c]; }
    double& at(std::size_t i, std::size_t c) { return values_[i * dim_ + c]; }
    std::span<const double> point(std::size_t i) const {
        return {values_.data() + i * dim_, dim_};
    }
    std::span<double> point(std::size_t i) {
        return {values_.data() + i * dim_, dim_};
    }
    const std::vector<double>& values() const { return values_; }

    // Linear interpolation at time t (clamped to [0,T]).
    double eval(double t, std::size_t c) const;
    void eval(double t, std::span<double> out) const;

    bool all_finite() const;

    GridPath& operator+=(const GridPath& other);
    GridPath& operator-=(const GridPath& other);
    GridPath& operator*=(double factor);
    friend GridPath operator-(GridPath lhs, const GridPath& rhs) { return lhs -= rhs; }
    friend GridPath operator+(GridPath lhs, const GridPath& rhs) { return lhs += rhs; }

private:
    GridPtr grid_;
    std::size_t dim_;
    std::vector<double> values_;
};

// Path stopped at t: equals x on [0,t] and stays at x(t) afterwards.
GridPath stop(const GridPath& x, double t);

// Read-only view of a path stopped at a grid index, optionally carrying a
// vertical bump (+delta on one coordinate from a grid index onwards). This is
// how coefficient functionals see trajectories: solvers pass the frontier of
// the values computed so far, derivative code adds bumps without copying.
class PathView {
public:
    explicit PathView(const GridPath& x)
        : PathView(x, x.size() - 1) {}
    PathView(const GridPath& x, std::size_t frontier);

    // Adds a vertical bump; at most two may be stacked (second derivatives).
    PathView with_bump(std::size_t from_index, std::size_t coord, double delta) const;
    // Same data, frontier moved back to index (no-op if already earlier).
    PathView stopped_at(std::size_t index) const;

    const TimeGrid& grid() const { return *grid_; }
    std::size_t dim() const { return dim_; }
    std::size_t frontier() const { return frontier_; }
    std::size_t size() const { return grid_->size(); }

    double value(std::size_t i, std::size_t c) const {
        const std::size_t j = i < frontier_ ? i : frontier_;
        double v = data_[j * dim_ + c];
        for (int b = 0; b < n_bumps_; ++b)
            if (i >= bumps_[b].from && c == bumps_[b].coord) v += bumps_[b].delta;
        return v;
    }

    // Linear interpolation through value().
    double eval(double t, std::size_t c) const;

private:
    struct Bump {
        std::size_t from;
        std::size_t coord;
        double delta;
    };

    const TimeGrid* grid_;
    const double* data_;
    std::size_t dim_;
    std::size_t frontier_;
    Bump bumps_[2] = {};
    int n_bumps_ = 0;
};

}  // namespace pathdep
