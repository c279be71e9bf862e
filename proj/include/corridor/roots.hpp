#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "corridor/errors.hpp"

namespace corridor {

struct Bracket {
  double lo;
  double hi;
};

/// Bisection on [lo, hi] for a function whose sign differs at the endpoints.
/// Stops once hi - lo <= abs_tol + rel_tol * |mid|, or when the interval can
/// no longer be split in floating point.
template <class F>
double bisect(F&& f, double lo, double hi, double abs_tol, double rel_tol = 0.0,
              int max_iter = 400) {
  const bool lo_negative = f(lo) < 0.0;
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= abs_tol + rel_tol * std::abs(mid) || mid <= lo || mid >= hi) {
      return mid;
    }
    if ((f(mid) < 0.0) == lo_negative) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Uniform samples of f at lo + (hi - lo) i / intervals, i = 0..intervals.
/// Returns the brackets of every strict sign change between neighbours.
template <class F>
std::vector<Bracket> sign_changes(F&& f, double lo, double hi, std::size_t intervals) {
  std::vector<Bracket> out;
  const double step = (hi - lo) / static_cast<double>(intervals);
  double prev_x = lo;
  bool prev_negative = f(lo) < 0.0;
  for (std::size_t i = 1; i <= intervals; ++i) {
    const double x = (i == intervals) ? hi : lo + step * static_cast<double>(i);
    const bool negative = f(x) < 0.0;
    if (negative != prev_negative) out.push_back({prev_x, x});
    prev_x = x;
    prev_negative = negative;
  }
  return out;
}

}  // namespace corridor
