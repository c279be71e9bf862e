#pragma once

// 1-cycles of the impulsive closed loop: one firing of weight lambda per
// period T. With X_T = (exp(-AT) - I)^{-1} B the pre-jump fixed point is
// lambda * X_T and the output over a period is lambda * z(tau, T), where
//
//     z(tau, T) = C exp(tau A) (I - exp(TA))^{-1} B,   0 <= tau <= T.
//
// z decreases, increases, then decreases again on [0, T]; its two stationary
// points tau1 < tau2 carry the minimum and maximum. The corridor design picks
// the unique T* where z_max / (z_max - z_min) matches the corridor ratio.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corridor/cascade.hpp"
#include "corridor/errors.hpp"
#include "corridor/kernels.hpp"
#include "corridor/roots.hpp"

namespace corridor {

struct OneCycleParams {
  double lambda;
  double period;

  OneCycleParams(double lambda_, double period_) : lambda(lambda_), period(period_) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw InvalidArgument("1-cycle weight lambda must be positive");
    }
    if (!(period > 0.0) || !std::isfinite(period)) {
      throw InvalidArgument("1-cycle period T must be positive");
    }
  }
};

/// Pre-jump state x(t_n^-) of a 1-cycle.
struct FixedPoint {
  StateVec X;
};

struct ExtremaResult {
  double tau1;
  double tau2;
  double z_min;
  double z_max;
};

/// Output band [y_min, y_max] with 0 < y_min < y_max.
struct CorridorSpec {
  double y_min;
  double y_max;

  CorridorSpec(double lo, double hi) : y_min(lo), y_max(hi) {
    if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
      throw InvalidCorridor("corridor bounds must satisfy 0 < y_min < y_max");
    }
  }

  /// Right-hand side of the design equation, y_max / (y_max - y_min) > 1.
  double design_ratio() const { return y_max / (y_max - y_min); }
};

struct CorridorDesign {
  double T_star;
  double lambda_star;
  ExtremaResult extrema;
  FixedPoint fixed_point;
};

inline FixedPoint fixed_point(const CascadeModel& model, const OneCycleParams& p) {
  const double T = p.period;
  const auto [x1, x2, x3] = model.eigenvalues();
  const CycleGenerator mu;
  return {{p.lambda * mu(x1 * T),
           p.lambda * model.g1() * T * divided_diff_1(mu, x1 * T, x2 * T),
           p.lambda * model.g1() * model.g2() * T * T *
               divided_diff_2(mu, x1 * T, x2 * T, x3 * T)}};
}

namespace detail {

inline void check_profile_args(double tau, double T) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("period T must be positive");
  if (!(tau >= 0.0) || !(tau <= T)) throw InvalidArgument("tau must lie in [0, T]");
}

}  // namespace detail

/// z(tau, T); the 1-cycle output with weight lambda is lambda * z.
inline double z_profile(const CascadeModel& model, double tau, double T) {
  detail::check_profile_args(tau, T);
  return output_entry(model, PeriodicKernel{tau, T});
}

/// dz/dtau = C A exp(tau A) (I - exp(TA))^{-1} B.
inline double dz_dtau(const CascadeModel& model, double tau, double T) {
  detail::check_profile_args(tau, T);
  return output_entry(model, TimesArgument{PeriodicKernel{tau, T}});
}

/// Stationary points of z(., T) given the impulse-response peak time.
inline ExtremaResult find_extrema(const CascadeModel& model, double T, double peak_time) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("period T must be positive");
  constexpr std::size_t kInitialGrid = 4096;
  constexpr std::size_t kMaxGrid = std::size_t{1} << 22;

  // Both roots lie below the impulse-response peak.
  const double upper = std::min(T, peak_time * (1.0 + 1e-9));
  auto slope = [&](double tau) { return output_entry(model, TimesArgument{PeriodicKernel{tau, T}}); };
  const double tol = 1e-13 * T;

  for (std::size_t n = kInitialGrid; n <= kMaxGrid; n *= 2) {
    const auto changes = sign_changes(slope, 0.0, upper, n);
    std::optional<Bracket> rising, falling;
    for (const auto& b : changes) {
      if (slope(b.lo) < 0.0) {
        if (!rising) rising = b;
      } else {
        falling = b;
      }
    }
    if (rising && falling && rising->hi <= falling->lo) {
      const double tau1 = bisect(slope, rising->lo, rising->hi, tol);
      const double tau2 = bisect(slope, falling->lo, falling->hi, tol);
      return {tau1, tau2, output_entry(model, PeriodicKernel{tau1, T}),
              output_entry(model, PeriodicKernel{tau2, T})};
    }
  }
  throw RootsNotResolved("find_extrema: could not isolate both stationary points for T = " +
                         std::to_string(T));
}

inline ExtremaResult find_extrema(const CascadeModel& model, double T) {
  return find_extrema(model, T, impulse_peak(model));
}

/// Psi(T) = z_max / (z_max - z_min), strictly decreasing from +inf to 1.
inline double psi(const CascadeModel& model, double T, double peak_time) {
  const auto e = find_extrema(model, T, peak_time);
  return e.z_max / (e.z_max - e.z_min);
}

inline double psi(const CascadeModel& model, double T) {
  return psi(model, T, impulse_peak(model));
}

/// (d z_min / dT, d z_max / dT), both negative.
inline std::pair<double, double> z_extrema_derivatives(const CascadeModel& model, double T,
                                                       double peak_time) {
  const auto e = find_extrema(model, T, peak_time);
  return {output_entry(model, TimesArgument{PeriodicSquaredKernel{e.tau1, T}}),
          output_entry(model, TimesArgument{PeriodicSquaredKernel{e.tau2, T}})};
}

inline std::pair<double, double> z_extrema_derivatives(const CascadeModel& model, double T) {
  return z_extrema_derivatives(model, T, impulse_peak(model));
}

struct PsiCurvePoint {
  double T;
  double z_min;
  double z_max;
  double psi;
};

/// z_min, z_max and Psi on a log-spaced grid of periods in [T_lo, T_hi].
inline std::vector<PsiCurvePoint> psi_curve(const CascadeModel& model, double T_lo, double T_hi,
                                            std::size_t points) {
  if (!(T_lo > 0.0) || !(T_hi > T_lo) || points < 2) {
    throw InvalidArgument("psi_curve: need 0 < T_lo < T_hi and at least 2 points");
  }
  const double peak = impulse_peak(model);
  std::vector<PsiCurvePoint> out;
  out.reserve(points);
  const double log_lo = std::log(T_lo);
  const double step = (std::log(T_hi) - log_lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    const double T = i + 1 == points ? T_hi : std::exp(log_lo + step * static_cast<double>(i));
    const auto e = find_extrema(model, T, peak);
    out.push_back({T, e.z_min, e.z_max, e.z_max / (e.z_max - e.z_min)});
  }
  return out;
}

struct CorridorSolverOptions {
  /// Starting scale of the bracket search; 0 selects the impulse-response peak.
  double initial_period = 0.0;
  int max_expansions = 60;
  /// Relative width of the final period bracket.
  double period_rel_tol = 1e-14;
};

/// Solves Psi(T*) = y_max / (y_max - y_min) and sets lambda* = y_max / z_max(T*).
inline CorridorDesign solve_corridor(const CascadeModel& model, const CorridorSpec& corridor,
                                     const CorridorSolverOptions& opts = {}) {
  const double peak = impulse_peak(model);
  const double target = corridor.design_ratio();
  auto excess = [&](double T) { return psi(model, T, peak) - target; };

  const double start = opts.initial_period > 0.0 ? opts.initial_period : peak;
  double lo = start;
  double hi = start;
  int k = 0;
  if (excess(start) > 0.0) {
    do {
      lo = hi;
      hi *= 2.0;
      if (++k > opts.max_expansions) {
        throw BracketNotFound("solve_corridor: Psi stays above the target up to T = " +
                              std::to_string(hi));
      }
    } while (excess(hi) > 0.0);
  } else {
    do {
      hi = lo;
      lo *= 0.5;
      if (++k > opts.max_expansions) {
        throw BracketNotFound("solve_corridor: Psi stays below the target down to T = " +
                              std::to_string(lo));
      }
    } while (excess(lo) <= 0.0);
  }

  const double T_star = bisect(excess, lo, hi, 0.0, opts.period_rel_tol);
  const auto extrema = find_extrema(model, T_star, peak);
  const double lambda_star = corridor.y_max / extrema.z_max;
  return {T_star, lambda_star, extrema, fixed_point(model, {lambda_star, T_star})};
}

}  // namespace corridor
