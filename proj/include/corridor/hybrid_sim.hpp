#pragma once

// Event-driven simulation of the pulse-modulated closed loop. Between
// firings the state flows as x(t) = exp((t - t_n) A) x(t_n^+); at a firing
// the state jumps by lambda_n e1. Period and weight of each firing are read
// from the modulation law at the pre-jump output.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <vector>

#include <fmt/format.h>

#include "corridor/cascade.hpp"
#include "corridor/errors.hpp"
#include "corridor/one_cycle.hpp"

namespace corridor {

/// value(y) = clamp(anchor_value + slope * (y - anchor_output), lower, upper).
class ClampedAffine {
 public:
  ClampedAffine(double anchor_output, double anchor_value, double slope, double lower,
                double upper)
      : anchor_output_(anchor_output),
        anchor_value_(anchor_value),
        slope_(slope),
        lower_(lower),
        upper_(upper) {
    if (!(lower > 0.0) || !(upper >= lower) || !std::isfinite(upper)) {
      throw InvalidArgument("modulation bounds must satisfy 0 < lower <= upper");
    }
    if (!std::isfinite(slope) || !std::isfinite(anchor_value) || !std::isfinite(anchor_output)) {
      throw InvalidArgument("modulation coefficients must be finite");
    }
  }

  static ClampedAffine constant(double value) { return {0.0, value, 0.0, value, value}; }

  double operator()(double y) const {
    return std::clamp(anchor_value_ + slope_ * (y - anchor_output_), lower_, upper_);
  }

  double slope() const { return slope_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  /// Intercept c0 of the unclamped map c0 + c1 y.
  double intercept() const { return anchor_value_ - slope_ * anchor_output_; }

 private:
  double anchor_output_;
  double anchor_value_;
  double slope_;
  double lower_;
  double upper_;
};

/// Frequency modulation (period) and amplitude modulation (weight).
struct ModulationLaw {
  ClampedAffine period;
  ClampedAffine weight;

  static ModulationLaw constant(const OneCycleParams& p) {
    return {ClampedAffine::constant(p.period), ClampedAffine::constant(p.lambda)};
  }
};

struct ModulationSlopes {
  double weight = 0.0;  // must be <= 0
  double period = 0.0;  // must be >= 0
};

/// Clamped affine laws through (X*_3, T*) and (X*_3, lambda*), bounded to
/// [T*/2, 2T*] and [lambda*/2, 2 lambda*].
inline ModulationLaw design_modulation(const OneCycleParams& target, const FixedPoint& fixed,
                                       ModulationSlopes slopes = {}) {
  if (!(slopes.weight <= 0.0) || !(slopes.period >= 0.0)) {
    throw InvalidSlopes("weight law must be nonincreasing and period law nondecreasing");
  }
  if (!fixed.X.positive()) throw InvalidArgument("design_modulation: fixed point must be positive");
  const double y = fixed.X.output();
  return {ClampedAffine(y, target.period, slopes.period, 0.5 * target.period, 2.0 * target.period),
          ClampedAffine(y, target.lambda, slopes.weight, 0.5 * target.lambda, 2.0 * target.lambda)};
}

/// X_{n+1} = exp(Phi(C X_n) A) (X_n + F(C X_n) e1).
inline StateVec step_map(const CascadeModel& model, const ModulationLaw& law, const StateVec& X) {
  const double y = X.output();
  const StateVec post{X.x1 + law.weight(y), X.x2, X.x3};
  return transition_matrix(model, law.period(y)) * post;
}

enum class SampleKind { Flow, PreJump, PostJump };

struct Sample {
  double t;
  StateVec x;
  SampleKind kind;
};

struct Firing {
  double time;
  double weight;
  double period;
  StateVec pre_jump;
};

/// Immutable record of a closed-loop run. Samples are time ordered; each
/// firing contributes a PreJump and a PostJump row at the same instant.
struct Trajectory {
  std::vector<Firing> firings;
  std::vector<Sample> samples;
  StateVec final_state;
  double final_time = 0.0;
};

inline Trajectory simulate(const CascadeModel& model, const ModulationLaw& law, const StateVec& x0,
                           std::size_t n_firings, std::size_t samples_per_interval) {
  if (!x0.nonnegative()) throw InvalidArgument("simulate: initial state must be nonnegative");
  if (n_firings < 1) throw InvalidArgument("simulate: need at least one firing");
  if (samples_per_interval < 2) throw InvalidArgument("simulate: need at least 2 samples per interval");

  Trajectory traj;
  traj.firings.reserve(n_firings);
  traj.samples.reserve(n_firings * (samples_per_interval + 1) + 1);

  StateVec X = x0;
  double t = 0.0;
  for (std::size_t n = 0; n < n_firings; ++n) {
    const double y = X.output();
    const double weight = law.weight(y);
    const double period = law.period(y);
    const StateVec post{X.x1 + weight, X.x2, X.x3};
    traj.firings.push_back({t, weight, period, X});
    traj.samples.push_back({t, X, SampleKind::PreJump});
    traj.samples.push_back({t, post, SampleKind::PostJump});
    for (std::size_t j = 1; j < samples_per_interval; ++j) {
      const double dt = period * static_cast<double>(j) / static_cast<double>(samples_per_interval);
      traj.samples.push_back({t + dt, transition_matrix(model, dt) * post, SampleKind::Flow});
    }
    X = transition_matrix(model, period) * post;
    t += period;
  }
  traj.samples.push_back({t, X, SampleKind::Flow});
  traj.final_state = X;
  traj.final_time = t;
  return traj;
}

struct OutputRange {
  double y_min;
  double y_max;
};

/// Min and max of the sampled output over the interval following firing n
/// (post-jump sample through the next pre-jump instant).
inline OutputRange interval_output_range(const Trajectory& traj, std::size_t n) {
  if (n >= traj.firings.size()) throw InvalidArgument("interval_output_range: no such firing");
  const double start = traj.firings[n].time;
  const double end = n + 1 < traj.firings.size() ? traj.firings[n + 1].time : traj.final_time;
  OutputRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& s : traj.samples) {
    if (s.t < start || s.t > end) continue;
    if (s.t == start && s.kind == SampleKind::PreJump) continue;
    if (s.t == end && s.kind == SampleKind::PostJump) continue;
    r.y_min = std::min(r.y_min, s.x.output());
    r.y_max = std::max(r.y_max, s.x.output());
  }
  return r;
}

/// CSV with columns t_min,y,x1,x2,x3,firing_flag.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t_min,y,x1,x2,x3,firing_flag\n";
  for (const auto& s : traj.samples) {
    out << fmt::format("{},{},{},{},{},{}\n", s.t, s.x.output(), s.x.x1, s.x.x2, s.x.x3,
                       s.kind == SampleKind::Flow ? 0 : 1);
  }
}

}  // namespace corridor
