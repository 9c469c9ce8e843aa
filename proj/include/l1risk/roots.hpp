// Copyright 2026 The l1risk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <string>

#include "l1risk/error.hpp"

namespace l1risk {

struct BisectionResult {
  double root = 0.0;
  double value = 0.0;  // f(root)
  int iterations = 0;
};

/// Bisection on a bracket [lo, hi] with f(lo), f(hi) of opposite sign (or one
/// of them zero).  Stops when the bracket is narrower than abs_tol or can no
/// longer be split in floating point.
template <typename F>
BisectionResult bisect(const F& f, double lo, double hi, double f_lo,
                       double f_hi, double abs_tol = 1e-12,
                       int max_iter = 2000) {
  if (f_lo == 0.0) return {lo, 0.0, 0};
  if (f_hi == 0.0) return {hi, 0.0, 0};
  if (std::signbit(f_lo) == std::signbit(f_hi))
    throw SolverError("bisect: no sign change on bracket", lo, hi);
  BisectionResult r;
  for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return {mid, 0.0, r.iterations};
    if (std::signbit(fm) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
      f_hi = fm;
    }
    if (hi - lo <= abs_tol) break;
  }
  // Report whichever endpoint has the smaller residual.
  if (std::abs(f_lo) <= std::abs(f_hi)) return {lo, f_lo, r.iterations};
  return {hi, f_hi, r.iterations};
}

template <typename F>
BisectionResult bisect(const F& f, double lo, double hi, double abs_tol = 1e-12) {
  return bisect(f, lo, hi, f(lo), f(hi), abs_tol);
}

/// Root of a decreasing function on [lo, +inf): doubles the upper end until the
/// sign flips, at most max_doublings times.
template <typename F>
BisectionResult bisect_decreasing_from(const F& f, double lo, double hi0,
                                       double abs_tol = 1e-12,
                                       int max_doublings = 200) {
  double f_lo = f(lo);
  if (f_lo <= 0.0) return {lo, f_lo, 0};
  double hi = hi0;
  double f_hi = f(hi);
  int steps = 0;
  while (f_hi > 0.0) {
    if (++steps > max_doublings)
      throw SolverError("bracket expansion failed", lo, hi);
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    f_hi = f(hi);
  }
  return bisect(f, lo, hi, f_lo, f_hi, abs_tol);
}

}  // namespace l1risk
