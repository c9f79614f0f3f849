#pragma once

#include "pathdep/functional.hpp"
#include "pathdep/grid.hpp"
#include "pathdep/partition.hpp"

#include <stdexcept>
#include <vector>

namespace pathdep {

// Initial condition on [0,r]; a single knot at 0 when there is no delay.
struct InitialSegment {
    std::vector<double> times;   // 0 = times[0] <= ... <= r
    std::vector<double> values;  // times.size() * dim, row-major
    std::size_t dim = 1;

    static InitialSegment constant(std::span<const double> value, double r = 0.0);
    static InitialSegment constant(double value, double r = 0.0);

    double eval(double t, std::size_t c) const;  // linear interpolation, clamped
};

struct SdeModel {
    FunctionalPtr drift;  // R^m
    FunctionalPtr sigma;  // R^{m x d}
    InitialSegment initial_segment;
    std::size_t m = 1;
    std::size_t d = 1;
};

// Trajectory blow-up: a growth-condition violation, not a numerics bug.
class SolverDivergence : public std::runtime_error {
public:
    explicit SolverDivergence(const std::string& what) : std::runtime_error(what) {}
};

class NonConvergence : public std::runtime_error {
public:
    explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct SolveReport {
    GridPath solution;
    std::size_t iterations = 0;
    std::vector<double> successive_distances;
    bool converged = false;
};

// Picard iteration for the integrated equation x(t) = x(r) + int_r^t F(s,x) ds
// with left-endpoint quadrature per grid cell; successive distances are
// measured in the delayed Cameron-Martin norm.
SolveReport solve_mild_ode(const CoefficientFunctional& rhs, const InitialSegment& x_hat,
                           GridPtr grid, double tol = 1e-10, std::size_t max_iter = 60);

// Skeleton flow: mild solution of xdot = (b - rho/2)(t,x) + sigma(t,x) hdot,
// with hdot the cellwise difference quotient of the driver.
SolveReport skeleton(const SdeModel& model, const GridPath& h, GridPtr grid,
                     double tol = 1e-10, std::size_t max_iter = 60);

// Left-point Euler scheme; each step evaluates the coefficients on the
// trajectory built so far, stopped at the step start.
GridPath euler_sde(const SdeModel& model, const GridPath& w);

// Picard iteration with left-point Ito sums against the fixed increments of
// w. Shares the stepping rule with euler_sde, so the fixed point coincides
// with the Euler trajectory on the same grid.
SolveReport picard_sde(const SdeModel& model, const GridPath& w, double tol = 1e-12,
                       std::size_t max_iter = 60);

// Euler scheme for d nY = (B_under + B_h hdot + B_bar nWdot) dt + Sigma dW,
// where nW is the delayed linear interpolation of w along the partition.
GridPath sequence_sde(const RoleAssignment& roles, const InitialSegment& x_hat,
                      const GridPath& h, const Partition& p, const GridPath& w);

// Euler scheme for dY = ((B_under + R) + B_h hdot) dt + (B_bar + Sigma) dW.
GridPath limit_sde(const RoleAssignment& roles, const InitialSegment& x_hat,
                   const GridPath& h, const GridPath& w);

// Forward preset: B_under = b - rho/2, B_h = 0, B_bar = sigma, Sigma = 0; the
// sequence equation is then the skeleton ODE driven by interpolated noise and
// the limit equation recovers the original SDE.
RoleAssignment forward_roles(const SdeModel& model);

// Reverse preset: B_under = b, B_h = sigma, B_bar = -sigma, Sigma = sigma;
// the limit diffusion vanishes and the limit drift is the skeleton flow.
RoleAssignment reverse_roles(const SdeModel& model);

}  // namespace pathdep
