#pragma once

// Third-order positive cascade
//
//        [ -a1   0    0  ]       [1]
//    A = [  g1  -a2   0  ],  B = [0],  C = [0 0 1],
//        [  0    g2  -a3 ]       [0]
//
// and exact matrix functions f(A) through divided differences of f at the
// eigenvalues -a1, -a2, -a3.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "corridor/divided_difference.hpp"
#include "corridor/errors.hpp"
#include "corridor/kernels.hpp"
#include "corridor/roots.hpp"

namespace corridor {

/// State of the cascade (compartment amounts). The output is the last one.
struct StateVec {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  double output() const { return x3; }

  bool positive() const { return x1 > 0.0 && x2 > 0.0 && x3 > 0.0; }
  bool nonnegative() const { return x1 >= 0.0 && x2 >= 0.0 && x3 >= 0.0; }

  friend StateVec operator+(const StateVec& a, const StateVec& b) {
    return {a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3};
  }
  friend StateVec operator-(const StateVec& a, const StateVec& b) {
    return {a.x1 - b.x1, a.x2 - b.x2, a.x3 - b.x3};
  }
  friend StateVec operator*(double s, const StateVec& v) { return {s * v.x1, s * v.x2, s * v.x3}; }
  friend bool operator==(const StateVec&, const StateVec&) = default;
};

/// Row-major 3x3 matrix.
struct Matrix3 {
  std::array<std::array<double, 3>, 3> m{};

  double& operator()(int i, int j) { return m[i][j]; }
  double operator()(int i, int j) const { return m[i][j]; }

  static Matrix3 identity() {
    Matrix3 r;
    r(0, 0) = r(1, 1) = r(2, 2) = 1.0;
    return r;
  }

  friend Matrix3 operator*(const Matrix3& a, const Matrix3& b) {
    Matrix3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) r(i, j) += a(i, k) * b(k, j);
    return r;
  }

  friend StateVec operator*(const Matrix3& a, const StateVec& v) {
    return {a(0, 0) * v.x1 + a(0, 1) * v.x2 + a(0, 2) * v.x3,
            a(1, 0) * v.x1 + a(1, 1) * v.x2 + a(1, 2) * v.x3,
            a(2, 0) * v.x1 + a(2, 1) * v.x2 + a(2, 2) * v.x3};
  }
};

/// The five positive parameters of the cascade. Decay rates must be pairwise
/// distinct (relative separation at least kMinRelativeSeparation).
class CascadeModel {
 public:
  CascadeModel(double a1, double a2, double a3, double g1, double g2)
      : a_{a1, a2, a3}, g1_(g1), g2_(g2) {
    for (double a : a_) {
      if (!(a > 0.0) || !std::isfinite(a)) {
        throw InvalidModel("decay rates must be positive and finite");
      }
    }
    if (!(g1 > 0.0) || !(g2 > 0.0) || !std::isfinite(g1) || !std::isfinite(g2)) {
      throw InvalidModel("coupling gains must be positive and finite");
    }
    detail::require_separated(a1, a2);
    detail::require_separated(a2, a3);
    detail::require_separated(a1, a3);
  }

  double a1() const { return a_[0]; }
  double a2() const { return a_[1]; }
  double a3() const { return a_[2]; }
  double g1() const { return g1_; }
  double g2() const { return g2_; }

  double a_min() const { return std::min({a_[0], a_[1], a_[2]}); }
  double a_max() const { return std::max({a_[0], a_[1], a_[2]}); }

  /// Eigenvalues of A, i.e. the divided-difference nodes.
  std::array<double, 3> eigenvalues() const { return {-a_[0], -a_[1], -a_[2]}; }

  Matrix3 state_matrix() const {
    Matrix3 r;
    r(0, 0) = -a_[0];
    r(1, 1) = -a_[1];
    r(2, 2) = -a_[2];
    r(1, 0) = g1_;
    r(2, 1) = g2_;
    return r;
  }

  /// -C A^{-1} B, the static gain of the input-output map.
  double static_gain() const { return g1_ * g2_ / (a_[0] * a_[1] * a_[2]); }

  friend bool operator==(const CascadeModel&, const CascadeModel&) = default;

 private:
  std::array<double, 3> a_;
  double g1_;
  double g2_;
};

/// f(A) for the cascade state matrix (Opitz formula). For f(tA) pass the
/// pre-scaled function s -> f(t s).
template <ScalarFunction F>
Matrix3 mat_func(const CascadeModel& model, const F& f) {
  const auto [x1, x2, x3] = model.eigenvalues();
  Matrix3 r;
  r(0, 0) = f(x1);
  r(1, 1) = f(x2);
  r(2, 2) = f(x3);
  r(1, 0) = model.g1() * divided_diff_1(f, x1, x2);
  r(2, 1) = model.g2() * divided_diff_1(f, x2, x3);
  r(2, 0) = model.g1() * model.g2() * divided_diff_2(f, x1, x2, x3);
  return r;
}

/// Entry (3,1) of f(A), i.e. C f(A) B.
template <ScalarFunction F>
double output_entry(const CascadeModel& model, const F& f) {
  const auto [x1, x2, x3] = model.eigenvalues();
  return model.g1() * model.g2() * divided_diff_2(f, x1, x2, x3);
}

/// exp(tA).
inline Matrix3 transition_matrix(const CascadeModel& model, double t) {
  return mat_func(model, ExpKernel{t});
}

/// Impulse response g(t) = C exp(tA) B.
inline double impulse_response(const CascadeModel& model, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("impulse_response: t must be nonnegative");
  return output_entry(model, ExpKernel{t});
}

/// dg/dt = C A exp(tA) B.
inline double impulse_response_rate(const CascadeModel& model, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("impulse_response_rate: t must be nonnegative");
  return output_entry(model, TimesArgument{ExpKernel{t}});
}

/// The unique interior maximizer t* of the impulse response.
inline double impulse_peak(const CascadeModel& model) {
  constexpr std::size_t kGrid = 4096;
  constexpr int kMaxExpansions = 60;
  const double lo = 1e-12 / model.a_min();
  double hi = 40.0 / model.a_min();
  auto rate = [&](double t) { return impulse_response_rate(model, t); };
  for (int i = 0; i <= kMaxExpansions; ++i) {
    if (rate(hi) < 0.0) {
      const auto changes = sign_changes(rate, lo, hi, kGrid);
      // g increases from 0 and decays to 0: the last + to - change is the peak.
      for (auto it = changes.rbegin(); it != changes.rend(); ++it) {
        if (rate(it->lo) > 0.0) return bisect(rate, it->lo, it->hi, 0.0, 1e-12);
      }
      break;
    }
    hi *= 2.0;
  }
  throw BracketNotFound("impulse_peak: no sign change of dg/dt found up to t = " +
                        std::to_string(hi));
}

}  // namespace corridor
