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

// Standard-normal primitives, soft thresholding, closed-form truncated
// Gaussian moments and the quadrature rules used to take expectations over
// Z ~ N(0, 1).

#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "l1risk/error.hpp"

namespace l1risk {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

/// Standard normal density.
inline double phi(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Standard normal CDF.  Uses erfc on the side where the result is small so
/// the left tail keeps full relative precision down to underflow.
inline double Phi(double x) {
  return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

/// Upper tail 1 - Phi(x), computed without cancellation.
inline double Phi_upper(double x) { return Phi(-x); }

/// log Phi(x).  For x < -8 the asymptotic Mills-ratio series is used so the
/// result stays finite long after Phi(x) itself underflows.
inline double log_Phi(double x) {
  if (x < -8.0) {
    const double r = 1.0 / (x * x);
    // 1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8 - 945/x^10
    const double series =
        1.0 + r * (-1.0 + r * (3.0 + r * (-15.0 + r * (105.0 + r * -945.0))));
    return -0.5 * x * x - std::log(-x) - kLogSqrt2Pi + std::log(series);
  }
  if (x > 5.0) return std::log1p(-Phi_upper(x));
  return std::log(Phi(x));
}

namespace detail {

// Acklam's rational approximation to the normal quantile (relative error
// about 1.15e-9 before refinement).
inline double acklam_quantile(double p) {
  static constexpr std::array<double, 6> a = {
      -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {
      7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
            a[5]) *
           q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r +
            1.0);
  }
  const double q = std::sqrt(-2.0 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
           c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace detail

/// Inverse of Phi on (0, 1): rational approximation followed by two Newton
/// steps on Phi.
inline double Phi_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("Phi_inv: p must lie in (0,1)");
  if (p == 0.5) return 0.0;
  // Work in the lower tail where Phi(x) - p carries full relative precision.
  const bool upper = p > 0.5;
  const double q = upper ? 1.0 - p : p;
  double x = detail::acklam_quantile(q);
  for (int i = 0; i < 2; ++i) {
    const double dens = phi(x);
    if (dens <= 0.0) break;
    x -= (Phi(x) - q) / dens;
  }
  return upper ? -x : x;
}

/// Soft thresholding eta(x; zeta) = (|x| - zeta)_+ sign(x).
inline double soft_threshold(double x, double zeta) {
  if (zeta < 0.0) throw DomainError("soft_threshold: negative threshold");
  if (x > zeta) return x - zeta;
  if (x < -zeta) return x + zeta;
  return 0.0;
}

/// Derivative of soft thresholding in x; zero at the kink |x| = zeta.
inline double soft_threshold_deriv(double x, double zeta) {
  if (zeta < 0.0) throw DomainError("soft_threshold_deriv: negative threshold");
  return std::abs(x) > zeta ? 1.0 : 0.0;
}

/// \int_b^\infty (z - a)^2 phi(z) dz = (b - 2a) phi(b) + (a^2 + 1) Phi(-b).
inline double truncated_second_moment(double a, double b) {
  return (b - 2.0 * a) * phi(b) + (a * a + 1.0) * Phi_upper(b);
}

/// g(x) = phi(x) - x Phi(-x), the Gaussian stop-loss transform.  Positive for
/// every finite x.
inline double g_fn(double x) {
  if (x > 5.0) {
    // phi(x) and x Phi(-x) cancel.  With the Mills continued fraction
    // Phi(-x)/phi(x) = 1/(x + t), t = 1/(x + 2/(x + 3/(x + ...))), we get
    // g(x) = phi(x) t / (x + t) without subtraction.
    double t = 0.0;
    for (int k = 300; k >= 2; --k) t = k / (x + t);
    t = 1.0 / (x + t);
    return phi(x) * t / (x + t);
  }
  return phi(x) - x * Phi_upper(x);
}

// ---------------------------------------------------------------------------
// Quadrature

enum class QuadratureKind { GaussHermiteProbabilist, AdaptiveInterval };

/// Nodes and weights for E[f(Z)], Z ~ N(0, 1).
///
/// For the Gauss-Hermite kind the weights integrate against the standard
/// normal density and sum to one.  The adaptive kind carries no fixed nodes:
/// `nodes` holds optional breakpoints (kinks of the integrand) and the rule
/// is applied by recursive Gauss-Kronrod subdivision.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  QuadratureKind kind = QuadratureKind::GaussHermiteProbabilist;
  double abs_tol = 1e-13;  // adaptive only
  double half_width = 40.0;  // adaptive only: integrate over [-w, w]
};

inline constexpr int kDefaultHermiteOrder = 61;

/// Probabilist Gauss-Hermite rule by Golub-Welsch on the Jacobi matrix of the
/// He_k recurrence (off-diagonal sqrt(k)).
inline QuadratureRule gauss_hermite_rule(int order = kDefaultHermiteOrder) {
  if (order < 1) throw DomainError("gauss_hermite_rule: order must be >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(std::max(order - 1, 0));
  for (int k = 1; k < order; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  QuadratureRule rule;
  rule.kind = QuadratureKind::GaussHermiteProbabilist;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    const double v = es.eigenvectors()(0, i);
    rule.weights[i] = v * v;
  }
  // Restore exact symmetry lost to rounding in the eigen-solver.
  for (int i = 0; i < order / 2; ++i) {
    const int j = order - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  return rule;
}

inline QuadratureRule adaptive_rule(std::vector<double> breakpoints = {},
                                    double abs_tol = 1e-13) {
  QuadratureRule rule;
  rule.kind = QuadratureKind::AdaptiveInterval;
  std::sort(breakpoints.begin(), breakpoints.end());
  rule.nodes = std::move(breakpoints);
  rule.abs_tol = abs_tol;
  return rule;
}

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
void gk15(const F& f, double a, double b, double& kronrod, double& error) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  kronrod = resk * half;
  error = std::abs((resk - resg) * half);
}

template <typename F>
double adaptive_gk(const F& f, double a, double b, double tol, int depth) {
  double k = 0.0, err = 0.0;
  gk15(f, a, b, k, err);
  if (err <= tol || depth >= 50 || b - a < 1e-14 * (1.0 + std::abs(a))) return k;
  const double m = 0.5 * (a + b);
  return adaptive_gk(f, a, m, 0.5 * tol, depth + 1) +
         adaptive_gk(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integral of f over [a, b], split at the given
/// breakpoints so piecewise-smooth integrands converge quickly.
template <typename F>
double integrate_adaptive(const F& f, double a, double b,
                          std::span<const double> breakpoints = {},
                          double abs_tol = 1e-13) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  const double per = abs_tol / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += detail::adaptive_gk(f, cuts[i], cuts[i + 1], per, 0);
  return total;
}

/// E[f(Z)] for Z ~ N(0, 1) under the given rule.
template <typename F>
double gaussian_expectation(const F& f, const QuadratureRule& rule) {
  double total = 0.0;
  if (rule.kind == QuadratureKind::GaussHermiteProbabilist) {
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = f(rule.nodes[i]);
      if (!std::isfinite(v))
        throw SolverError("gaussian_expectation: non-finite integrand at z=" +
                          std::to_string(rule.nodes[i]));
      total += rule.weights[i] * v;
    }
    return total;
  }
  const double w = rule.half_width;
  auto weighted = [&](double z) {
    const double v = f(z);
    if (!std::isfinite(v))
      throw SolverError("gaussian_expectation: non-finite integrand at z=" +
                        std::to_string(z));
    return v * phi(z);
  };
  return integrate_adaptive(weighted, -w, w, rule.nodes, rule.abs_tol);
}

}  // namespace l1risk
