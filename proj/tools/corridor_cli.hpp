#pragma once

// Command-line front end. Every number printed or written here comes from
// the library; this file only parses flags and formats results.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "corridor/corridor.hpp"

namespace corridor::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kFailure = 2 };

/// Raised for invalid flag combinations or values (exit 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelFlags {
  std::vector<double> a;
  std::vector<double> g;
  std::optional<double> alpha;
  double gamma = pkpd::cohort_stats::kGammaMean;
};

struct CorridorFlags {
  std::string corridor;
  std::string corridor_effect;
};

inline void add_model_flags(CLI::App& cmd, ModelFlags& m) {
  auto* a = cmd.add_option("--a", m.a, "decay rates a1,a2,a3 (1/min)")->delimiter(',')->expected(3);
  auto* g = cmd.add_option("--g", m.g, "coupling gains g1,g2")->delimiter(',')->expected(2);
  auto* alpha = cmd.add_option("--alpha", m.alpha, "PKPD patient parameter alpha (1/min)");
  cmd.add_option("--gamma", m.gamma, "Hill exponent for effect-domain corridors")->capture_default_str();
  a->needs(g);
  g->needs(a);
  alpha->excludes(a)->excludes(g);
}

inline void add_corridor_flags(CLI::App& cmd, CorridorFlags& c) {
  auto* raw = cmd.add_option("--corridor", c.corridor, "output corridor lo:hi in model output units");
  auto* eff = cmd.add_option("--corridor-effect", c.corridor_effect, "effect corridor lo:hi in % (needs --alpha)");
  raw->excludes(eff);
}

inline CascadeModel build_model(const ModelFlags& m) {
  if (m.alpha) {
    try {
      return pkpd::model_from_alpha(*m.alpha);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  if (m.a.size() != 3 || m.g.size() != 2) throw UsageError("a model is required: --alpha, or --a and --g");
  try {
    return CascadeModel(m.a[0], m.a[1], m.a[2], m.g[0], m.g[1]);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

inline CorridorSpec parse_range(const std::string& text, const std::string& flag) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError(flag + " expects lo:hi");
  try {
    std::size_t used_lo = 0, used_hi = 0;
    const std::string lo_s = text.substr(0, colon), hi_s = text.substr(colon + 1);
    const double lo = std::stod(lo_s, &used_lo);
    const double hi = std::stod(hi_s, &used_hi);
    if (used_lo != lo_s.size() || used_hi != hi_s.size()) throw UsageError(flag + " expects lo:hi");
    return CorridorSpec(lo, hi);
  } catch (const InvalidCorridor& e) {
    throw UsageError(flag + ": " + e.what());
  } catch (const std::logic_error&) {
    throw UsageError(flag + " expects lo:hi");
  }
}

/// The corridor in model output units, if one was given.
inline std::optional<CorridorSpec> output_corridor(const CorridorFlags& c, const ModelFlags& m) {
  if (!c.corridor.empty()) return parse_range(c.corridor, "--corridor");
  if (!c.corridor_effect.empty()) {
    if (!m.alpha) throw UsageError("--corridor-effect needs a PKPD model (--alpha)");
    const auto effect = parse_range(c.corridor_effect, "--corridor-effect");
    try {
      return pkpd::concentration_corridor(effect, m.gamma);
    } catch (const Error& e) {
      throw UsageError(std::string("--corridor-effect: ") + e.what());
    }
  }
  return std::nullopt;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open output file " + path);
  return f;
}

inline nlohmann::ordered_json state_json(const StateVec& x) { return {x.x1, x.x2, x.x3}; }

inline nlohmann::ordered_json design_json(const CorridorSpec& c, const CorridorDesign& d) {
  return {{"y_min_star", c.y_min},
          {"y_max_star", c.y_max},
          {"T_star", d.T_star},
          {"lambda_star", d.lambda_star},
          {"tau1", d.extrema.tau1},
          {"tau2", d.extrema.tau2},
          {"y_min", d.lambda_star * d.extrema.z_min},
          {"y_max", d.lambda_star * d.extrema.z_max},
          {"fixed_point", state_json(d.fixed_point.X)}};
}

inline void print_design(std::ostream& out, const CorridorDesign& d) {
  const auto& X = d.fixed_point.X;
  out << fmt::format("{:<10} {}\n", "T*", d.T_star) << fmt::format("{:<10} {}\n", "lambda*", d.lambda_star)
      << fmt::format("{:<10} {}\n", "tau1", d.extrema.tau1) << fmt::format("{:<10} {}\n", "tau2", d.extrema.tau2)
      << fmt::format("{:<10} {}\n", "y_min", d.lambda_star * d.extrema.z_min)
      << fmt::format("{:<10} {}\n", "y_max", d.lambda_star * d.extrema.z_max)
      << fmt::format("{:<10} {}, {}, {}\n", "X*", X.x1, X.x2, X.x3);
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pulse-modulated corridor design for third-order positive cascades"};
  app.require_subcommand(1);

  // design
  ModelFlags design_model;
  CorridorFlags design_corridor;
  bool design_json_flag = false;
  std::string design_out;
  double design_initial = 0.0;
  auto* design = app.add_subcommand("design", "solve for the 1-cycle (T*, lambda*) that fits a corridor");
  add_model_flags(*design, design_model);
  add_corridor_flags(*design, design_corridor);
  design->add_flag("--json", design_json_flag, "print the report as JSON");
  design->add_option("--out", design_out, "also write the JSON report to this file");
  design->add_option("--initial-period", design_initial, "starting scale of the period bracket (min)");

  // simulate
  ModelFlags sim_model;
  CorridorFlags sim_corridor;
  std::optional<double> sim_lambda, sim_period;
  std::size_t sim_firings = 50, sim_samples = 400;
  double weight_slope = 0.0, period_slope = 0.0;
  std::vector<double> sim_x0;
  std::string sim_out = "trajectory.csv";
  bool sim_pkpd = false, sim_json = false;
  auto* simulate_cmd = app.add_subcommand("simulate", "simulate the closed loop and write a trajectory CSV");
  add_model_flags(*simulate_cmd, sim_model);
  add_corridor_flags(*simulate_cmd, sim_corridor);
  auto* lam_opt = simulate_cmd->add_option("--lambda", sim_lambda, "impulse weight of an explicit 1-cycle");
  auto* per_opt = simulate_cmd->add_option("--period", sim_period, "period of an explicit 1-cycle (min)");
  lam_opt->needs(per_opt);
  per_opt->needs(lam_opt);
  simulate_cmd->add_option("--firings", sim_firings, "number of impulses")->capture_default_str();
  simulate_cmd->add_option("--samples", sim_samples, "output samples per interval")->capture_default_str();
  simulate_cmd->add_option("--weight-slope", weight_slope, "slope of the amplitude law (<= 0)")->capture_default_str();
  simulate_cmd->add_option("--period-slope", period_slope, "slope of the frequency law (>= 0)")->capture_default_str();
  simulate_cmd->add_option("--x0", sim_x0, "initial state x1,x2,x3 (default: the 1-cycle fixed point)")
      ->delimiter(',')
      ->expected(3);
  simulate_cmd->add_option("--out", sim_out, "trajectory CSV path")->capture_default_str();
  simulate_cmd->add_flag("--pkpd", sim_pkpd, "also report the effect-domain range (needs --alpha)");
  simulate_cmd->add_flag("--json", sim_json, "print the summary as JSON");

  // cohort
  std::string cohort_in, cohort_out = "verdicts.csv", cohort_json_out, psi_dir;
  std::string cohort_effect = "2:10";
  bool cohort_json = false, cohort_strict = false, cohort_timestamp = false;
  pkpd::ClinicalLimits limits;
  std::size_t psi_points = 200;
  unsigned threads = 1;
  auto* cohort = app.add_subcommand("cohort", "assess feasibility of every patient model in a CSV");
  cohort->add_option("--in", cohort_in, "cohort CSV with header pin,alpha,gamma")->required();
  cohort->add_option("--out", cohort_out, "verdict CSV path")->capture_default_str();
  cohort->add_option("--corridor-effect", cohort_effect, "effect corridor lo:hi in %")->capture_default_str();
  cohort->add_option("--lambda-max", limits.lambda_max, "largest clinical dose (ug/kg)")->capture_default_str();
  cohort->add_option("--t-max", limits.T_max, "longest clinical interval (min)")->capture_default_str();
  cohort->add_flag("--json", cohort_json, "also write a JSON report");
  cohort->add_option("--json-out", cohort_json_out, "JSON report path (default: --out with .json)");
  cohort->add_flag("--strict", cohort_strict, "exit 2 when any row fails");
  cohort->add_option("--psi-curves", psi_dir, "write psi_curve_<pin>.csv per patient into this directory");
  cohort->add_option("--psi-points", psi_points, "points per psi curve")->capture_default_str();
  cohort->add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();
  cohort->add_flag("--timestamp", cohort_timestamp, "add a generation timestamp to the JSON metadata");

  // psi-curve
  ModelFlags curve_model;
  std::optional<double> curve_lo, curve_hi;
  std::size_t curve_points = 200;
  std::string curve_out;
  auto* curve = app.add_subcommand("psi-curve", "tabulate z_min, z_max and Psi over a log grid of periods");
  add_model_flags(*curve, curve_model);
  curve->add_option("--t-min", curve_lo, "smallest period (default 0.01/a_max)");
  curve->add_option("--t-max", curve_hi, "largest period (default 30/a_min)");
  curve->add_option("--points", curve_points, "grid size")->capture_default_str();
  curve->add_option("--out", curve_out, "CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  // Inputs are validated first (exit 1); failures after that are computational (exit 2).
  try {
    if (*design) {
      const CascadeModel model = build_model(design_model);
      const auto corridor = output_corridor(design_corridor, design_model);
      if (!corridor) throw UsageError("design needs --corridor or --corridor-effect\n" + design->help());
      CorridorSolverOptions opts;
      opts.initial_period = design_initial;
      CorridorDesign d{};
      try {
        d = solve_corridor(model, *corridor, opts);
      } catch (const Error& e) {
        err << "design failed: " << e.what() << '\n';
        return kFailure;
      }
      const auto report = design_json(*corridor, d);
      if (design_json_flag) {
        out << report.dump(2) << '\n';
      } else {
        print_design(out, d);
      }
      if (!design_out.empty()) open_output(design_out) << report.dump(2) << '\n';
      return kOk;
    }

    if (*simulate_cmd) {
      const CascadeModel model = build_model(sim_model);
      const auto corridor = output_corridor(sim_corridor, sim_model);
      if (sim_pkpd && !sim_model.alpha) throw UsageError("--pkpd needs --alpha");
      if (!corridor && !sim_lambda) throw UsageError("simulate needs a corridor or --lambda/--period");
      if (corridor && sim_lambda) throw UsageError("give either a corridor or --lambda/--period, not both");
      if (sim_firings < 1) throw UsageError("--firings must be at least 1");
      if (sim_samples < 2) throw UsageError("--samples must be at least 2");
      if (weight_slope > 0.0 || period_slope < 0.0) {
        throw UsageError("--weight-slope must be <= 0 and --period-slope >= 0");
      }
      std::optional<OneCycleParams> params;
      if (sim_lambda) {
        try {
          params.emplace(*sim_lambda, *sim_period);
        } catch (const Error& e) {
          throw UsageError(e.what());
        }
      }
      std::optional<StateVec> x0;
      if (!sim_x0.empty()) {
        x0 = StateVec{sim_x0[0], sim_x0[1], sim_x0[2]};
        if (!x0->nonnegative()) throw UsageError("--x0 must be nonnegative");
      }
      std::ofstream csv = open_output(sim_out);

      Trajectory traj;
      try {
        if (corridor) {
          const auto d = solve_corridor(model, *corridor);
          params.emplace(d.lambda_star, d.T_star);
        }
        const FixedPoint fp = fixed_point(model, *params);
        const ModulationLaw law = design_modulation(*params, fp, {weight_slope, period_slope});
        traj = simulate(model, law, x0.value_or(fp.X), sim_firings, sim_samples);
      } catch (const Error& e) {
        err << "simulation failed: " << e.what() << '\n';
        return kFailure;
      }
      write_trajectory_csv(csv, traj);

      const auto last = interval_output_range(traj, traj.firings.size() - 1);
      nlohmann::ordered_json summary = {{"lambda", params->lambda},
                                        {"T", params->period},
                                        {"firings", traj.firings.size()},
                                        {"last_period_y_min", last.y_min},
                                        {"last_period_y_max", last.y_max}};
      if (sim_pkpd) {
        summary["last_period_effect_min"] = pkpd::hill(last.y_max, sim_model.gamma);
        summary["last_period_effect_max"] = pkpd::hill(last.y_min, sim_model.gamma);
      }
      if (sim_json) {
        out << summary.dump(2) << '\n';
      } else {
        for (const auto& [key, value] : summary.items()) out << fmt::format("{:<24} {}\n", key, value.dump());
      }
      return kOk;
    }

    if (*cohort) {
      const auto effect = parse_range(cohort_effect, "--corridor-effect");
      std::ifstream in(cohort_in, std::ios::binary);
      if (!in) throw UsageError("cannot read " + cohort_in);
      const auto input = io::read_cohort_csv(in);
      for (const auto& issue : input.issues) err << (issue.fatal ? "error: " : "warning: ") << issue.message << '\n';
      if (input.rows.empty()) throw UsageError("no usable rows in " + cohort_in);

      std::vector<pkpd::FeasibilityVerdict> verdicts;
      try {
        verdicts = pkpd::run_cohort(input.rows, effect, limits, {}, threads);
      } catch (const DuplicatePin& e) {
        throw UsageError(e.what());
      }
      open_output(cohort_out) << [&] {
        std::ostringstream s;
        io::write_verdicts_csv(s, verdicts);
        return s.str();
      }();

      if (cohort_json) {
        auto report = io::verdicts_json(verdicts, effect, limits, input.issues);
        if (cohort_timestamp) {
          const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
          char buf[32];
          std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
          report["metadata"] = {{"generated_at", buf}};
        }
        const std::string path = cohort_json_out.empty()
                                      ? std::filesystem::path(cohort_out).replace_extension(".json").string()
                                      : cohort_json_out;
        open_output(path) << report.dump(2) << '\n';
      }

      bool any_failed = input.has_fatal_issue();
      if (!psi_dir.empty()) {
        std::filesystem::create_directories(psi_dir);
        for (const auto& row : input.rows) {
          try {
            const auto model = pkpd::model_from_alpha(row.alpha);
            const auto pts = psi_curve(model, 0.01 / model.a_max(), 30.0 / model.a_min(), psi_points);
            auto f = open_output((std::filesystem::path(psi_dir) / ("psi_curve_" + row.pin + ".csv")).string());
            io::write_psi_curve_csv(f, pts);
          } catch (const Error& e) {
            err << "psi curve for " << row.pin << " failed: " << e.what() << '\n';
            any_failed = true;
          }
        }
      }

      const auto s = pkpd::summarize(verdicts);
      out << fmt::format("patients                  {}\n", s.total)
          << fmt::format("feasible                  {}\n", s.feasible)
          << fmt::format("dose-limited              {}\n", s.dose_limited)
          << fmt::format("interval-limited          {}\n", s.interval_limited)
          << fmt::format("dose-and-interval-limited {}\n", s.dose_and_interval_limited)
          << fmt::format("failed                    {}\n", s.failed);
      for (const auto& v : verdicts) {
        if (!v.diagnostic.empty()) err << "row " << v.pin << ": " << v.diagnostic << '\n';
      }
      if (cohort_strict && (any_failed || s.failed > 0)) return kFailure;
      return kOk;
    }

    if (*curve) {
      const CascadeModel model = build_model(curve_model);
      const double lo = curve_lo.value_or(0.01 / model.a_max());
      const double hi = curve_hi.value_or(30.0 / model.a_min());
      if (!(lo > 0.0) || !(hi > lo) || curve_points < 2) {
        throw UsageError("psi-curve needs 0 < --t-min < --t-max and --points >= 2");
      }
      std::vector<PsiCurvePoint> pts;
      try {
        pts = psi_curve(model, lo, hi, curve_points);
      } catch (const Error& e) {
        err << "psi-curve failed: " << e.what() << '\n';
        return kFailure;
      }
      if (curve_out.empty()) {
        io::write_psi_curve_csv(out, pts);
      } else {
        auto f = open_output(curve_out);
        io::write_psi_curve_csv(f, pts);
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace corridor::cli
