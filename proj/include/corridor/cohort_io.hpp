#pragma once

// Text formats for cohort runs. Numbers are written in shortest round-trip
// form so identical inputs give byte-identical files.

#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "corridor/one_cycle.hpp"
#include "corridor/pkpd.hpp"

namespace corridor::io {

struct CsvIssue {
  std::size_t line;  // 1-based line number in the input
  std::string message;
  bool fatal;  // the row was dropped
};

struct CohortInput {
  std::vector<pkpd::PatientModel> rows;
  std::vector<CsvIssue> issues;

  bool has_fatal_issue() const {
    for (const auto& i : issues)
      if (i.fatal) return true;
    return false;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Plain decimal only: digits, one '.', optional sign and exponent.
inline std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  for (char ch : s) {
    const bool ok = (ch >= '0' && ch <= '9') || ch == '.' || ch == '-' || ch == '+' || ch == 'e' || ch == 'E';
    if (!ok) return std::nullopt;
  }
  std::string buf(s);
  std::size_t used = 0;
  try {
    const double v = std::stod(buf, &used);
    if (used != buf.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline std::string number(double v) {
  if (std::isnan(v)) return "";
  return fmt::format("{}", v);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace detail

/// Reads `pin,alpha,gamma` rows. Malformed rows and rows with alpha outside
/// (0, 0.1] or nonpositive gamma are dropped with a fatal issue; rows
/// outside the published cohort envelope are kept with a warning.
inline CohortInput read_cohort_csv(std::istream& in) {
  CohortInput result;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view text = line;
    if (lineno == 1 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    if (detail::trim(text).empty()) continue;
    const auto fields = detail::split(text, ',');
    if (!header_seen) {
      header_seen = true;
      if (fields.size() != 3 || fields[0] != "pin" || fields[1] != "alpha" || fields[2] != "gamma") {
        result.issues.push_back({lineno, "expected header 'pin,alpha,gamma'", true});
        return result;
      }
      continue;
    }
    if (fields.size() != 3) {
      result.issues.push_back(
          {lineno, fmt::format("line {}: expected 3 fields, found {}", lineno, fields.size()), true});
      continue;
    }
    const auto alpha = detail::parse_number(fields[1]);
    const auto gamma = detail::parse_number(fields[2]);
    if (fields[0].empty() || !alpha || !gamma) {
      result.issues.push_back({lineno, fmt::format("line {}: malformed row '{}'", lineno, line), true});
      continue;
    }
    if (!(*alpha > 0.0) || *alpha > pkpd::kAlphaUpperBound) {
      result.issues.push_back(
          {lineno, fmt::format("line {}: alpha {} outside (0, 0.1]", lineno, *alpha), true});
      continue;
    }
    if (!(*gamma > 0.0)) {
      result.issues.push_back({lineno, fmt::format("line {}: gamma {} must be positive", lineno, *gamma), true});
      continue;
    }
    using namespace pkpd::cohort_stats;
    if (*alpha < kAlphaMin || *alpha > kAlphaMax || *gamma < kGammaMin || *gamma > kGammaMax) {
      result.issues.push_back(
          {lineno, fmt::format("line {}: ({}, {}) outside the published cohort envelope", lineno, *alpha, *gamma),
           false});
    }
    result.rows.push_back({std::string(fields[0]), *alpha, *gamma});
  }
  if (!header_seen) result.issues.push_back({lineno, "empty input, expected header 'pin,alpha,gamma'", true});
  return result;
}

inline void write_verdicts_csv(std::ostream& out, const std::vector<pkpd::FeasibilityVerdict>& verdicts) {
  out << "pin,alpha,gamma,T_star_min,lambda_star_ugkg,dose_ok,interval_ok,feasible,diagnostic\n";
  for (const auto& v : verdicts) {
    out << detail::csv_field(v.pin) << ',' << detail::number(v.alpha) << ',' << detail::number(v.gamma) << ','
        << detail::number(v.T_star) << ',' << detail::number(v.lambda_star) << ',' << int(v.dose_ok) << ','
        << int(v.interval_ok) << ',' << int(v.feasible) << ',' << detail::csv_field(v.diagnostic) << '\n';
  }
}

inline nlohmann::ordered_json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

inline nlohmann::ordered_json verdicts_json(const std::vector<pkpd::FeasibilityVerdict>& verdicts,
                                            const CorridorSpec& effect_corridor,
                                            const pkpd::ClinicalLimits& limits,
                                            const std::vector<CsvIssue>& issues = {}) {
  nlohmann::ordered_json j;
  j["effect_corridor_percent"] = {effect_corridor.y_min, effect_corridor.y_max};
  j["limits"] = {{"lambda_max_ugkg", limits.lambda_max}, {"T_max_min", limits.T_max}};
  const auto s = pkpd::summarize(verdicts);
  j["summary"] = {{"total", s.total},
                  {"feasible", s.feasible},
                  {"dose_limited", s.dose_limited},
                  {"interval_limited", s.interval_limited},
                  {"dose_and_interval_limited", s.dose_and_interval_limited},
                  {"failed", s.failed}};
  auto& rows = j["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& v : verdicts) {
    rows.push_back({{"pin", v.pin},
                    {"alpha", v.alpha},
                    {"gamma", v.gamma},
                    {"T_star_min", number_or_null(v.T_star)},
                    {"lambda_star_ugkg", number_or_null(v.lambda_star)},
                    {"dose_ok", v.dose_ok},
                    {"interval_ok", v.interval_ok},
                    {"feasible", v.feasible},
                    {"classification", pkpd::to_string(v.classification())},
                    {"within_maintenance_guidance", v.within_maintenance_guidance},
                    {"diagnostic", v.diagnostic}});
  }
  auto& notes = j["input_issues"] = nlohmann::ordered_json::array();
  for (const auto& i : issues) notes.push_back({{"line", i.line}, {"message", i.message}, {"fatal", i.fatal}});
  return j;
}

/// Columns T,z_min,z_max,z_diff,psi.
inline void write_psi_curve_csv(std::ostream& out, const std::vector<PsiCurvePoint>& curve) {
  out << "T,z_min,z_max,z_diff,psi\n";
  for (const auto& p : curve) {
    out << fmt::format("{},{},{},{},{}\n", p.T, p.z_min, p.z_max, p.z_max - p.z_min, p.psi);
  }
}

}  // namespace corridor::io
