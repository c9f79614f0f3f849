#include "pathdep/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pathdep {

namespace {

bool detect_uniform(const std::vector<double>& pts) {
    if (pts.size() < 3) return true;
    const double h = (pts.back() - pts.front()) / static_cast<double>(pts.size() - 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (std::abs(pts[i + 1] - pts[i] - h) > 1e-12 * std::max(1.0, std::abs(h)))
            return false;
    }
    return true;
}

}  // namespace

TimeGrid::TimeGrid(std::vector<double> points, double delay)
    : points_(std::move(points)), delay_(delay) {
    if (points_.size() < 2) throw std::invalid_argument("grid needs at least 2 points");
    if (points_.front() != 0.0) throw std::invalid_argument("grid must start at 0");
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        if (!(points_[i] < points_[i + 1]))
            throw std::invalid_argument("grid points must be strictly increasing");
    }
    if (delay_ < 0.0 || delay_ >= t_end())
        throw std::invalid_argument("delay must satisfy 0 <= r < T");
    delay_index_ = index_of(delay_);
    uniform_ = detect_uniform(points_);
    spacing_ = 0.0;
    for (std::size_t i = 0; i + 1 < points_.size(); ++i)
        spacing_ = std::max(spacing_, points_[i + 1] - points_[i]);
}

std::shared_ptr<const TimeGrid> TimeGrid::uniform(double t_end, std::size_t cells,
                                                  double delay) {
    if (cells == 0) throw std::invalid_argument("grid needs at least 1 cell");
    if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
    std::vector<double> pts(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i)
        pts[i] = t_end * static_cast<double>(i) / static_cast<double>(cells);
    pts.back() = t_end;
    if (delay != 0.0) {
        // r must land on a grid point.
        const double pos = delay / t_end * static_cast<double>(cells);
        const double snapped = std::round(pos);
        if (std::abs(pos - snapped) > 1e-9)
            throw std::invalid_argument("delay is not a point of the uniform grid");
        pts[static_cast<std::size_t>(snapped)] = delay;
    }
    return std::shared_ptr<const TimeGrid>(new TimeGrid(std::move(pts), delay));
}

std::shared_ptr<const TimeGrid> TimeGrid::from_points(std::vector<double> points,
                                                      double delay) {
    return std::shared_ptr<const TimeGrid>(new TimeGrid(std::move(points), delay));
}

std::size_t TimeGrid::cell_of(double t) const {
    if (t < points_.front() || t > points_.back())
        throw std::out_of_range("time outside [0,T]");
    if (t >= points_[points_.size() - 2]) return points_.size() - 2;
    auto it = std::upper_bound(points_.begin(), points_.end(), t);
    return static_cast<std::size_t>(it - points_.begin()) - 1;
}

std::size_t TimeGrid::index_at_or_below(double t) const {
    if (t >= points_.back()) return points_.size() - 1;
    return cell_of(t);
}

std::size_t TimeGrid::index_of(double t, double tol) const {
    const std::size_t i = index_at_or_below(t);
    if (std::abs(points_[i] - t) <= tol) return i;
    if (i + 1 < points_.size() && std::abs(points_[i + 1] - t) <= tol) return i + 1;
    throw std::invalid_argument("time is not a grid point");
}

GridPath::GridPath(GridPtr grid, std::size_t dim)
    : grid_(std::move(grid)), dim_(dim), values_(grid_->size() * dim, 0.0) {
    if (dim_ == 0) throw std::invalid_argument("path dimension must be positive");
}

GridPath GridPath::constant(GridPtr grid, std::span<const double> value) {
    GridPath p(std::move(grid), value.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        std::copy(value.begin(), value.end(), p.values_.begin() + i * p.dim_);
    return p;
}

GridPath GridPath::constant(GridPtr grid, double value) {
    const double v[1] = {value};
    return constant(std::move(grid), std::span<const double>(v, 1));
}

double GridPath::eval(double t, std::size_t c) const {
    const auto& pts = grid_->points();
    if (t <= pts.front()) return at(0, c);
    if (t >= pts.back()) return at(pts.size() - 1, c);
    const std::size_t i = grid_->cell_of(t);
    const double w = (t - pts[i]) / (pts[i + 1] - pts[i]);
    return (1.0 - w) * at(i, c) + w * at(i + 1, c);
}

void GridPath::eval(double t, std::span<double> out) const {
    for (std::size_t c = 0; c < dim_; ++c) out[c] = eval(t, c);
}

bool GridPath::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

GridPath& GridPath::operator+=(const GridPath& other) {
    if (other.values_.size() != values_.size())
        throw std::invalid_argument("path size mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

GridPath& GridPath::operator-=(const GridPath& other) {
    if (other.values_.size() != values_.size())
        throw std::invalid_argument("path size mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

GridPath& GridPath::operator*=(double factor) {
    for (double& v : values_) v *= factor;
    return *this;
}

GridPath stop(const GridPath& x, double t) {
    const auto& pts = x.grid().points();
    if (t < pts.front() || t > pts.back())
        throw std::out_of_range("stopping time outside [0,T]");
    std::vector<double> frozen(x.dim());
    x.eval(t, frozen);

    const std::size_t below = x.grid().index_at_or_below(t);
    if (pts[below] == t) {
        GridPath out = x;
        for (std::size_t i = below + 1; i < pts.size(); ++i)
            for (std::size_t c = 0; c < x.dim(); ++c) out.at(i, c) = frozen[c];
        return out;
    }

    // Off-grid stopping time: the kink at t is not representable on the
    // original grid, so insert t. The result then equals x(s ^ t) exactly as
    // a piecewise-linear path, and stopping again is the identity.
    std::vector<double> augmented;
    augmented.reserve(pts.size() + 1);
    augmented.insert(augmented.end(), pts.begin(), pts.begin() + below + 1);
    augmented.push_back(t);
    augmented.insert(augmented.end(), pts.begin() + below + 1, pts.end());
    GridPath out(TimeGrid::from_points(std::move(augmented), x.grid().delay()), x.dim());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double u = out.grid().point(i);
        for (std::size_t c = 0; c < x.dim(); ++c)
            out.at(i, c) = u <= t ? x.eval(u, c) : frozen[c];
    }
    return out;
}

PathView::PathView(const GridPath& x, std::size_t frontier)
    : grid_(&x.grid()), data_(x.values().data()), dim_(x.dim()), frontier_(frontier) {
    if (frontier_ >= x.size()) throw std::out_of_range("frontier outside grid");
}

PathView PathView::with_bump(std::size_t from_index, std::size_t coord,
                             double delta) const {
    PathView v = *this;
    if (v.n_bumps_ >= 2) throw std::logic_error("at most two stacked bumps");
    v.bumps_[v.n_bumps_++] = Bump{from_index, coord, delta};
    return v;
}

PathView PathView::stopped_at(std::size_t index) const {
    PathView v = *this;
    v.frontier_ = std::min(v.frontier_, index);
    return v;
}

double PathView::eval(double t, std::size_t c) const {
    const auto& pts = grid_->points();
    if (t <= pts.front()) return value(0, c);
    if (t >= pts.back()) return value(pts.size() - 1, c);
    const std::size_t i = grid_->cell_of(t);
    const double w = (t - pts[i]) / (pts[i + 1] - pts[i]);
    return (1.0 - w) * value(i, c) + w * value(i + 1, c);
}

}  // namespace pathdep
