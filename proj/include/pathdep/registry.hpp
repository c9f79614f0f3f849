#pragma once

#include "pathdep/functional.hpp"

#include <string>

namespace pathdep {

// Builds a coefficient from a declarative spec string, e.g.
//   "constant(0.5)"            constant matrix, all entries 0.5
//   "constant(1|0|0|1)"        row-major entries
//   "linear(scale=1)"          entry(k,l) = scale * x_k(t)
//   "tanh(scale=0.8, gain=1)"  entry(k,l) = scale * tanh(gain * x_k(t))
//   "sin(scale=1, gain=2)"     entry(k,l) = scale * sin(gain * x_k(t))
//   "integral(inner=tanh, scale=1, gain=1)"  entry = int_0^t scale*inner(gain*x_k) du
//   "delayed(tau=0.1, inner=tanh, scale=1, gain=1)"  entry = scale*inner(gain*x_k((t-tau) v 0))
//   "running_sup(scale=1)"     entry(k) = scale * sup_{u<=t} |x_k(u)|
// Shape: rows x cols of the produced coefficient.
FunctionalPtr make_functional(const std::string& spec, Shape shape);

// Round-trip helper: the canonical spec string of a registry coefficient.
std::string canonical_spec(const std::string& spec);

}  // namespace pathdep
