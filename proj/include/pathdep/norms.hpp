#pragma once

#include "pathdep/grid.hpp"

namespace pathdep {

// Supremum norm over the grid points (Euclidean norm per point).
double sup_norm(const GridPath& x);

// Delayed alpha-Hoelder norm: sup norm of the path stopped at the delay
// horizon r plus the Hoelder quotient taken over all pairs of grid points in
// [r,T]. Exact on the sampled skeleton, hence a certified lower bound for the
// continuum norm. alpha = 0 is the sup norm by convention.
double holder_norm(const GridPath& x, double alpha);

// The pair supremum sup |x(s)-x(t)| / |s-t|^alpha over grid points of [r,T]
// alone (alpha = 0 gives the range). This is the quantity the quantitative
// continuity estimate bounds.
double holder_quotient(const GridPath& x, double alpha);

// Delayed Cameron-Martin norm: stopped sup norm plus the L2 norm of the
// cellwise difference quotient on [r,T]. Exact for piecewise-linear paths.
double cm_norm(const GridPath& x);

// Pseudometric |t-s|^(1/2) + ||x^t - y^s||_inf on [r,T] x paths.
double d_infty(double t, const GridPath& x, double s, const GridPath& y);

}  // namespace pathdep
