#pragma once

// Wiener PKPD model of a neuromuscular blockade agent: a three-compartment
// cascade (one patient parameter alpha, unit static gain) followed by a Hill
// nonlinearity (patient parameter gamma). A patient model is feasible when
// the bolus regimen that holds the effect inside the clinical corridor is
// within the dose and interval limits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "corridor/cascade.hpp"
#include "corridor/errors.hpp"
#include "corridor/one_cycle.hpp"

namespace corridor::pkpd {

struct PopulationConstants {
  double v1 = 1.0;
  double v2 = 4.0;
  double v3 = 10.0;
  double c50 = 3.2425;  // ug/ml
};

/// Published cohort envelope and population means.
namespace cohort_stats {
inline constexpr double kAlphaMin = 0.0270;
inline constexpr double kAlphaMax = 0.0524;
inline constexpr double kGammaMin = 1.4030;
inline constexpr double kGammaMax = 5.5619;
inline constexpr double kAlphaMean = 0.0374;
inline constexpr double kGammaMean = 2.6677;
}  // namespace cohort_stats

struct PatientModel {
  std::string pin;
  double alpha;  // 1/min
  double gamma;  // Hill exponent
};

struct ClinicalLimits {
  double lambda_max = 600.0;  // ug/kg
  double T_max = 45.0;        // min
};

/// Maintenance-dose guidance used only for an advisory flag.
struct MaintenanceGuidance {
  double dose_lo = 80.0;
  double dose_hi = 200.0;
  double interval_lo = 15.0;
  double interval_hi = 25.0;
};

inline constexpr double kAlphaUpperBound = 0.1;

inline CascadeModel model_from_alpha(double alpha, const PopulationConstants& c = {}) {
  if (!(alpha > 0.0) || !(alpha <= kAlphaUpperBound)) {
    throw AlphaOutOfRange("alpha must lie in (0, 0.1], got " + std::to_string(alpha));
  }
  return CascadeModel(c.v1 * alpha, c.v2 * alpha, c.v3 * alpha, c.v1 * alpha,
                      c.v2 * c.v3 * alpha * alpha);
}

/// Effect in percent for concentration y_bar >= 0.
inline double hill(double y_bar, double gamma, const PopulationConstants& c = {}) {
  if (!(y_bar >= 0.0)) throw InvalidArgument("hill: concentration must be nonnegative");
  if (!(gamma > 0.0)) throw InvalidArgument("hill: gamma must be positive");
  // 100 / (1 + (y/C50)^gamma) is the same map without overflow in C50^gamma.
  return 100.0 / (1.0 + std::pow(y_bar / c.c50, gamma));
}

/// Concentration producing effect y (percent), y in (0, 100).
inline double hill_inverse(double y, double gamma, const PopulationConstants& c = {}) {
  if (!(y > 0.0) || !(y < 100.0)) {
    throw EffectOutOfRange("effect must lie strictly between 0 and 100 %, got " + std::to_string(y));
  }
  if (!(gamma > 0.0)) throw InvalidArgument("hill_inverse: gamma must be positive");
  return c.c50 * std::pow(100.0 / y - 1.0, 1.0 / gamma);
}

/// Effect corridor [y_min, y_max] % mapped to concentrations. Hill is
/// decreasing, so the upper effect bound gives the lower concentration.
inline CorridorSpec concentration_corridor(const CorridorSpec& effect, double gamma,
                                           const PopulationConstants& c = {}) {
  return {hill_inverse(effect.y_max, gamma, c), hill_inverse(effect.y_min, gamma, c)};
}

inline CorridorSpec default_effect_corridor() { return {2.0, 10.0}; }

enum class Classification { Feasible, DoseLimited, IntervalLimited, DoseAndIntervalLimited, Failed };

inline const char* to_string(Classification c) {
  switch (c) {
    case Classification::Feasible: return "feasible";
    case Classification::DoseLimited: return "dose_limited";
    case Classification::IntervalLimited: return "interval_limited";
    case Classification::DoseAndIntervalLimited: return "dose_and_interval_limited";
    case Classification::Failed: return "failed";
  }
  return "failed";
}

struct FeasibilityVerdict {
  std::string pin;
  double alpha = 0.0;
  double gamma = 0.0;
  double T_star = std::numeric_limits<double>::quiet_NaN();
  double lambda_star = std::numeric_limits<double>::quiet_NaN();
  bool dose_ok = false;
  bool interval_ok = false;
  bool feasible = false;
  /// Advisory only: (T*, lambda*) inside the routine maintenance regimen.
  bool within_maintenance_guidance = false;
  /// Empty unless the computation failed.
  std::string diagnostic;

  Classification classification() const {
    if (!diagnostic.empty()) return Classification::Failed;
    if (feasible) return Classification::Feasible;
    if (!dose_ok && !interval_ok) return Classification::DoseAndIntervalLimited;
    return dose_ok ? Classification::IntervalLimited : Classification::DoseLimited;
  }
};

inline FeasibilityVerdict assess_feasibility(const PatientModel& patient,
                                             const CorridorSpec& effect_corridor = default_effect_corridor(),
                                             const ClinicalLimits& limits = {},
                                             const PopulationConstants& consts = {}) {
  FeasibilityVerdict v;
  v.pin = patient.pin;
  v.alpha = patient.alpha;
  v.gamma = patient.gamma;
  try {
    const CascadeModel model = model_from_alpha(patient.alpha, consts);
    const CorridorSpec conc = concentration_corridor(effect_corridor, patient.gamma, consts);
    const CorridorDesign design = solve_corridor(model, conc);
    v.T_star = design.T_star;
    v.lambda_star = design.lambda_star;
  } catch (const Error& e) {
    v.diagnostic = e.what();
    return v;
  }
  v.dose_ok = v.lambda_star <= limits.lambda_max;
  v.interval_ok = v.T_star <= limits.T_max;
  v.feasible = v.dose_ok && v.interval_ok;
  const MaintenanceGuidance g;
  v.within_maintenance_guidance = v.lambda_star >= g.dose_lo && v.lambda_star <= g.dose_hi &&
                                  v.T_star >= g.interval_lo && v.T_star <= g.interval_hi;
  return v;
}

struct CohortSummary {
  std::size_t total = 0;
  std::size_t feasible = 0;
  std::size_t dose_limited = 0;
  std::size_t interval_limited = 0;
  std::size_t dose_and_interval_limited = 0;
  std::size_t failed = 0;
};

inline CohortSummary summarize(const std::vector<FeasibilityVerdict>& verdicts) {
  CohortSummary s;
  s.total = verdicts.size();
  for (const auto& v : verdicts) {
    switch (v.classification()) {
      case Classification::Feasible: ++s.feasible; break;
      case Classification::DoseLimited: ++s.dose_limited; break;
      case Classification::IntervalLimited: ++s.interval_limited; break;
      case Classification::DoseAndIntervalLimited: ++s.dose_and_interval_limited; break;
      case Classification::Failed: ++s.failed; break;
    }
  }
  return s;
}

/// One verdict per row in input order. Rows are independent and may be
/// evaluated on several threads (threads = 0 picks the hardware count).
inline std::vector<FeasibilityVerdict> run_cohort(const std::vector<PatientModel>& rows,
                                                  const CorridorSpec& effect_corridor = default_effect_corridor(),
                                                  const ClinicalLimits& limits = {},
                                                  const PopulationConstants& consts = {},
                                                  unsigned threads = 1) {
  if (rows.empty()) throw EmptyCohort("cohort has no rows");
  std::set<std::string> seen;
  for (const auto& r : rows) {
    if (!seen.insert(r.pin).second) throw DuplicatePin(r.pin);
  }

  std::vector<FeasibilityVerdict> out(rows.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, rows.size()));
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < rows.size(); i += stride) {
      out[i] = assess_feasibility(rows[i], effect_corridor, limits, consts);
    }
  };
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned k = 0; k < threads; ++k) jobs.push_back(std::async(std::launch::async, work, k, threads));
    for (auto& j : jobs) j.get();
  }
  return out;
}

}  // namespace corridor::pkpd
