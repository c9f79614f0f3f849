#include "pathdep/partition.hpp"

#include "pathdep/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pathdep {

Partition::Partition(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw std::invalid_argument("partition needs >= 2 points");
    mesh_ = 0.0;
    min_cell_ = points_.back() - points_.front();
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
        const double dt = points_[i + 1] - points_[i];
        if (!(dt > 0.0))
            throw std::invalid_argument("partition points must be strictly increasing");
        mesh_ = std::max(mesh_, dt);
        min_cell_ = std::min(min_cell_, dt);
    }
}

Partition Partition::uniform(double r, double t_end, std::size_t cells) {
    if (cells == 0) throw std::invalid_argument("partition needs at least 1 cell");
    if (!(r < t_end)) throw std::invalid_argument("requires r < T");
    std::vector<double> pts(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i)
        pts[i] = r + (t_end - r) * static_cast<double>(i) / static_cast<double>(cells);
    pts.front() = r;
    pts.back() = t_end;
    return Partition(std::move(pts));
}

Partition Partition::from_points(std::vector<double> points) {
    return Partition(std::move(points));
}

Partition Partition::uniform_on_grid(const TimeGrid& grid, std::size_t cells) {
    if (cells == 0) throw std::invalid_argument("partition needs at least 1 cell");
    const std::size_t lo = grid.delay_index();
    const std::size_t span = grid.size() - 1 - lo;
    if (span % cells != 0)
        throw std::invalid_argument("partition cells must divide the grid cells");
    const std::size_t step = span / cells;
    std::vector<double> pts(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) pts[i] = grid.point(lo + i * step);
    return Partition(std::move(pts));
}

Partition Partition::jittered_on_grid(const TimeGrid& grid, std::size_t cells,
                                      double balance_cap, GaussianStream& rng) {
    const std::size_t lo = grid.delay_index();
    const std::size_t span = grid.size() - 1 - lo;
    if (cells == 0 || span % cells != 0)
        throw std::invalid_argument("partition cells must divide the grid cells");
    const std::size_t step = span / cells;
    // Jitter interior points by up to a sixth of a cell; cell lengths then
    // stay within [2/3, 4/3] of nominal, so the balance constant is <= 2.
    const std::size_t amp = step / 6;
    std::vector<std::size_t> idx(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) idx[i] = lo + i * step;
    for (std::size_t i = 1; i < cells; ++i) {
        const double u = 2.0 * rng.next_uniform() - 1.0;
        const long shift = static_cast<long>(std::lround(u * static_cast<double>(amp)));
        idx[i] = static_cast<std::size_t>(static_cast<long>(idx[i]) + shift);
    }
    std::vector<double> pts(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) pts[i] = grid.point(idx[i]);
    Partition p(std::move(pts));
    if (p.balance_constant() > balance_cap)
        throw std::invalid_argument("jittered partition exceeds the balance cap");
    return p;
}

Partition::Bracket Partition::locate(double t) const {
    if (t < points_.front() - 1e-12 || t > points_.back() + 1e-12)
        throw std::out_of_range("time outside [r,T]");
    const std::size_t k = cells();
    if (t >= points_[k - 1] && t >= points_.back()) return Bracket{k - 1, k, k};
    auto it = std::upper_bound(points_.begin(), points_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - points_.begin());
    i = (i == 0) ? 0 : i - 1;
    if (i >= k) return Bracket{k - 1, k, k};
    return Bracket{i == 0 ? 0 : i - 1, i, i + 1};
}

double Partition::delta(std::size_t i) const {
    if (i >= points_.size()) throw std::out_of_range("partition index");
    if (i == 0) return 0.0;
    return points_[i] - points_[i - 1];
}

double Partition::gamma(double s) const {
    const Bracket b = locate(s);
    if (b.index == b.succ) return 1.0;  // s = T
    const double num = delta(b.index);
    if (num == 0.0) return 0.0;
    return num / delta(b.succ);
}

PartitionSweep PartitionSweep::dyadic_on_grid(const TimeGrid& grid,
                                              const std::vector<std::size_t>& cells,
                                              double balance_cap) {
    PartitionSweep sweep;
    for (std::size_t c : cells) sweep.partitions.push_back(Partition::uniform_on_grid(grid, c));
    sweep.validate(balance_cap);
    return sweep;
}

PartitionSweep PartitionSweep::jittered_on_grid(const TimeGrid& grid,
                                                const std::vector<std::size_t>& cells,
                                                double balance_cap,
                                                GaussianStream& rng) {
    PartitionSweep sweep;
    for (std::size_t c : cells)
        sweep.partitions.push_back(Partition::jittered_on_grid(grid, c, balance_cap, rng));
    sweep.validate(balance_cap);
    return sweep;
}

void PartitionSweep::validate(double balance_cap) const {
    if (partitions.empty()) throw std::invalid_argument("empty partition sweep");
    for (std::size_t i = 0; i < partitions.size(); ++i) {
        if (partitions[i].balance_constant() > balance_cap + 1e-12)
            throw std::invalid_argument("partition sweep exceeds the balance cap");
        if (i > 0 && !(partitions[i].mesh() < partitions[i - 1].mesh()))
            throw std::invalid_argument("sweep meshes must be strictly decreasing");
    }
}

GridPath interpolate(const Partition& p, const GridPath& x) {
    const TimeGrid& grid = x.grid();
    const std::size_t k = p.cells();
    std::vector<std::size_t> pidx(k + 1);
    for (std::size_t i = 0; i <= k; ++i) pidx[i] = grid.index_of(p.points()[i]);

    GridPath out(x.grid_ptr(), x.dim());
    // Up to the first interior point: x(r ^ t).
    const std::size_t ridx = grid.delay_index();
    for (std::size_t j = 0; j <= pidx[1]; ++j) {
        const std::size_t src = j < ridx ? j : ridx;
        for (std::size_t c = 0; c < x.dim(); ++c) out.at(j, c) = x.at(src, c);
    }
    // Cell i+1 interpolates the values at t_{i-1} and t_i.
    for (std::size_t i = 1; i < k; ++i) {
        const double ti = p.points()[i];
        const double dt = p.points()[i + 1] - ti;
        for (std::size_t j = pidx[i] + 1; j <= pidx[i + 1]; ++j) {
            const double w = (grid.point(j) - ti) / dt;
            for (std::size_t c = 0; c < x.dim(); ++c) {
                const double a = x.at(pidx[i - 1], c);
                const double b = x.at(pidx[i], c);
                out.at(j, c) = a + w * (b - a);
            }
        }
    }
    return out;
}

double interpolation_error(const Partition& p, const GridPath& x, double t) {
    if (t < p.points()[1] - 1e-12)
        throw std::out_of_range("time below the first interior partition point");
    return sup_norm(stop(interpolate(p, x), t) - stop(x, t));
}

}  // namespace pathdep
