#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <string>

#include "corridor/errors.hpp"

namespace corridor {

/// Minimum relative distance between two divided-difference nodes.
inline constexpr double kMinRelativeSeparation = 1e-9;

template <class F>
concept ScalarFunction = requires(const F& f, double x) {
  { f(x) } -> std::convertible_to<double>;
};

/// A scalar function that knows how to evaluate its own first and second
/// divided differences more accurately than the difference-quotient formula.
/// Implementations may assume the nodes are already validated.
template <class F>
concept AccurateDividedDifferences = ScalarFunction<F> && requires(const F& f, double x) {
  { f.dd1(x, x) } -> std::convertible_to<double>;
  { f.dd2(x, x, x) } -> std::convertible_to<double>;
};

namespace detail {

inline void require_separated(double x0, double x1) {
  const double scale = std::max(std::abs(x0), std::abs(x1));
  const double gap = std::abs(x1 - x0);
  if (!(gap > 0.0) || gap < kMinRelativeSeparation * scale) {
    throw NearCoincidentPoints("divided-difference nodes " + std::to_string(x0) + " and " +
                               std::to_string(x1) + " are not separated");
  }
}

inline void sort3(double& x0, double& x1, double& x2) {
  if (x0 > x1) std::swap(x0, x1);
  if (x1 > x2) std::swap(x1, x2);
  if (x0 > x1) std::swap(x0, x1);
}

// Unchecked evaluation, dispatching to the function's own formulas when present.
template <ScalarFunction F>
double dd1_unchecked(const F& f, double x0, double x1) {
  if constexpr (AccurateDividedDifferences<F>) {
    return f.dd1(x0, x1);
  } else {
    return (f(x1) - f(x0)) / (x1 - x0);
  }
}

template <ScalarFunction F>
double dd2_unchecked(const F& f, double x0, double x1, double x2) {
  if constexpr (AccurateDividedDifferences<F>) {
    return f.dd2(x0, x1, x2);
  } else {
    // Sorted nodes put the widest gap in the outer denominator.
    sort3(x0, x1, x2);
    return (dd1_unchecked(f, x1, x2) - dd1_unchecked(f, x0, x1)) / (x2 - x0);
  }
}

}  // namespace detail

/// f[x0, x1] = (f(x1) - f(x0)) / (x1 - x0).
template <ScalarFunction F>
double divided_diff_1(const F& f, double x0, double x1) {
  detail::require_separated(x0, x1);
  return detail::dd1_unchecked(f, x0, x1);
}

/// f[x0, x1, x2] = (f[x1, x2] - f[x0, x1]) / (x2 - x0). Symmetric in its nodes.
template <ScalarFunction F>
double divided_diff_2(const F& f, double x0, double x1, double x2) {
  detail::require_separated(x0, x1);
  detail::require_separated(x1, x2);
  detail::require_separated(x0, x2);
  return detail::dd2_unchecked(f, x0, x1, x2);
}

}  // namespace corridor
