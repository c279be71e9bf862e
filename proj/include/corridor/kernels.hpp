#pragma once

// Scalar functions whose matrix functions at the cascade state matrix are
// needed by the 1-cycle analysis. Kernels that are evaluated near a
// removable cancellation carry their own divided-difference formulas.

#include <cmath>
#include <utility>

#include "corridor/divided_difference.hpp"

namespace corridor {

/// s -> exp(t s). Divided differences stay accurate to full relative
/// precision for small t (where the nodes look coincident to the exponential).
struct ExpKernel {
  double t;

  double operator()(double s) const { return std::exp(t * s); }

  double dd1(double x0, double x1) const {
    // Anchor at the node with the larger exponent so expm1 sees a nonpositive argument.
    if (t * x0 < t * x1) std::swap(x0, x1);
    const double d = x1 - x0;
    return std::exp(t * x0) * std::expm1(t * d) / d;
  }

  double dd2(double x0, double x1, double x2) const {
    detail::sort3(x0, x1, x2);
    if (std::abs(t) * (x2 - x0) > 1.0) {
      return (dd1(x1, x2) - dd1(x0, x1)) / (x2 - x0);
    }
    // exp(t c) * sum_{m>=0} t^2 h_m(u) / (m+2)!, with u_i = t (x_i - c) and
    // h_m the complete homogeneous symmetric polynomials.
    const double c = (x0 + x1 + x2) / 3.0;
    const double u0 = t * (x0 - c);
    const double u1 = t * (x1 - c);
    const double u2 = t * (x2 - c);
    const double e1 = u0 + u1 + u2;
    const double e2 = u0 * u1 + u0 * u2 + u1 * u2;
    const double e3 = u0 * u1 * u2;
    double h_prev3 = 0.0, h_prev2 = 0.0, h_prev1 = 1.0;  // h_{m-3}, h_{m-2}, h_{m-1}
    double factorial = 2.0;                               // (m+2)!
    double sum = 0.5;                                     // m = 0
    double prev_term = 0.5;
    for (int m = 1; m < 40; ++m) {
      const double h = e1 * h_prev1 - e2 * h_prev2 + e3 * h_prev3;
      factorial *= static_cast<double>(m + 2);
      const double term = h / factorial;
      sum += term;
      h_prev3 = h_prev2;
      h_prev2 = h_prev1;
      h_prev1 = h;
      // h_1 = e1 vanishes for centered nodes, so look at two terms at a time.
      if (m >= 2 && std::abs(term) + std::abs(prev_term) < 1e-18 * std::abs(sum)) break;
      prev_term = term;
    }
    return std::exp(t * c) * t * t * sum;
  }
};

/// s -> s * f(s), divided differences by the Leibniz rule.
template <ScalarFunction F>
struct TimesArgument {
  F f;

  double operator()(double s) const { return s * f(s); }

  double dd1(double x0, double x1) const {
    return x0 * detail::dd1_unchecked(f, x0, x1) + f(x1);
  }

  double dd2(double x0, double x1, double x2) const {
    return x0 * detail::dd2_unchecked(f, x0, x1, x2) + detail::dd1_unchecked(f, x1, x2);
  }
};

template <ScalarFunction F>
TimesArgument(F) -> TimesArgument<F>;

/// s -> exp(s) / (1 - exp(s)), the 1-cycle fixed-point generator (s < 0).
struct CycleGenerator {
  double operator()(double s) const { return 1.0 / std::expm1(-s); }
};

/// s -> exp(offset s) / (1 - exp(period s)).
struct GeometricTail {
  double offset;
  double period;

  double operator()(double s) const { return std::exp(offset * s) / -std::expm1(period * s); }
};

/// s -> exp(tau s) / (1 - exp(T s)), generating the normalized 1-cycle output
/// z(tau, T). Split as exp(tau s) + exp((tau + T) s) / (1 - exp(T s)) so that
/// the nearly constant leading term goes through the exact exponential path.
struct PeriodicKernel {
  double tau;
  double period;

  double operator()(double s) const { return std::exp(tau * s) / -std::expm1(period * s); }

  double dd1(double x0, double x1) const {
    return ExpKernel{tau}.dd1(x0, x1) +
           detail::dd1_unchecked(GeometricTail{tau + period, period}, x0, x1);
  }

  double dd2(double x0, double x1, double x2) const {
    return ExpKernel{tau}.dd2(x0, x1, x2) +
           detail::dd2_unchecked(GeometricTail{tau + period, period}, x0, x1, x2);
  }
};

/// s -> exp((T + tau) s) / (1 - exp(T s))^2, the period-derivative of PeriodicKernel
/// divided by s.
struct PeriodicSquaredKernel {
  double tau;
  double period;

  double operator()(double s) const {
    const double denom = std::expm1(period * s);
    return std::exp((period + tau) * s) / (denom * denom);
  }
};

}  // namespace corridor
