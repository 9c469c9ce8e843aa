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

// Risk of the minimum l1-norm interpolator as a function of the aspect ratio,
// its derivative by implicit differentiation, and closed-form limit curves.

#pragma once

#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "l1risk/error.hpp"
#include "l1risk/fixed_point.hpp"
#include "l1risk/parallel.hpp"
#include "l1risk/prior.hpp"
#include "l1risk/special_functions.hpp"

namespace l1risk {

struct Partials {
  double d_nu = 0.0;
  double d_delta = 0.0;
  double d_alpha = 0.0;
};

inline Partials partials_F1(double nu, double delta, double alpha,
                            const SparseContext& c) {
  const double sd = std::sqrt(delta);
  const double b = sd * nu;
  const double gap = phi(alpha - b) - phi(alpha + b);
  Partials p;
  p.d_alpha = -c.epsilon * (phi(alpha - b) + phi(alpha + b)) -
              2.0 * (1.0 - c.epsilon) * phi(alpha);
  p.d_delta = c.epsilon * nu / (2.0 * sd) * gap - 1.0;
  p.d_nu = c.epsilon * sd * gap;
  return p;
}

inline Partials partials_F2(double nu, double delta, double alpha,
                            const SparseContext& c) {
  const double sd = std::sqrt(delta);
  const double b = sd * nu;
  const double a = alpha;
  const double e = c.epsilon;
  const double inside = Phi(a - b) - Phi(-a - b);
  const double tails = Phi(-a - b) + Phi(-a + b);

  const double f22 = soft_threshold_mse(b, a);
  const double f23 = soft_threshold_mse(0.0, a);
  // d F22 / d delta at fixed (nu, alpha).
  const double f22_d_delta = nu * nu * inside;

  Partials p;
  p.d_alpha = e / delta * (-2.0 * (phi(a + b) + phi(a - b)) + 2.0 * a * tails) +
              (1.0 - e) / delta * (-4.0 * g_fn(a));
  p.d_delta = -e / (delta * delta) * (f22 - delta * f22_d_delta) -
              (1.0 - e) / (delta * delta) * f23;
  p.d_nu = 2.0 * c.sigma * c.sigma * nu / (c.M * c.M) + 2.0 * e * nu * inside;
  return p;
}

struct NuPrimeParts {
  double numerator = 0.0;    // d_delta F2 d_alpha F1 - d_alpha F2 d_delta F1
  double denominator = 0.0;  // d_nu F2 d_alpha F1 - d_alpha F2 d_nu F1
  double value() const { return -numerator / denominator; }
};

inline constexpr double kSingularDenominator = 1e-14;

inline NuPrimeParts nu_prime_parts(double nu, double delta, double alpha,
                                   const SparseContext& c) {
  const Partials p1 = partials_F1(nu, delta, alpha, c);
  const Partials p2 = partials_F2(nu, delta, alpha, c);
  return {p2.d_delta * p1.d_alpha - p2.d_alpha * p1.d_delta,
          p2.d_nu * p1.d_alpha - p2.d_alpha * p1.d_nu};
}

/// d nu* / d delta along the solution path, by the implicit function theorem.
inline double nu_prime(double delta, const FixedPointSolution& s,
                       const SparseContext& c) {
  if (!s.nu_star) throw DomainError("nu_prime: solution lacks nu (sparse prior required)");
  const auto parts = nu_prime_parts(*s.nu_star, delta, s.alpha_star, c);
  if (std::abs(parts.denominator) < kSingularDenominator)
    throw SolverError("nu_prime: singular derivative, |denominator| = " +
                      std::to_string(std::abs(parts.denominator)));
  return parts.value();
}

// ---------------------------------------------------------------------------
// Closed-form limits.

/// sigma^2 + E[Theta^2] / delta; equals 1 + SNR for the sparse model at sigma = 1.
inline double tau0_sq(const ModelParams& params) {
  return params.sigma * params.sigma + second_moment(params.prior) / params.delta;
}

/// sqrt(alpha g(alpha) / Phi(-alpha)) with alpha = -Phi_inv(delta / 2).
inline double H_fn(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("H_fn: delta must lie in (0, 1)");
  const double a = -Phi_inv(0.5 * delta);
  return std::sqrt(a * g_fn(a) / Phi(-a));
}

/// Ridgeless least-squares (minimum l2-norm) risk on the sparse model.
inline double l2_interpolator_risk(double delta, double epsilon, double M, double sigma) {
  if (!(delta > 0.0) || delta == 1.0)
    throw DomainError("l2_interpolator_risk: delta must be positive and != 1");
  if (delta > 1.0) return ols_limit(delta, sigma);
  return epsilon * M * M * (1.0 - delta) + sigma * sigma / (1.0 - delta);
}

struct EpsZeroLimits {
  double alpha0 = 0.0;
  double nu_over_M = 0.0;
};

/// Limits of alpha* and nu*/M as epsilon -> 0 with SNR fixed.
inline EpsZeroLimits eps_to_zero_limits(double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw DomainError("eps_to_zero_limits: delta must lie in (0, 1)");
  const double a = -Phi_inv(0.5 * delta);
  const double inner = -a * phi(a) + (a * a + 1.0) * Phi(-a);
  return {a, std::sqrt(1.0 - 2.0 / delta * inner)};
}

// ---------------------------------------------------------------------------
// Sweeps.

enum class Regime { Descending, Ascending, Singular };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Descending: return "descending";
    case Regime::Ascending: return "ascending";
    case Regime::Singular: return "singular";
  }
  return "?";
}

struct CurvePoint {
  double delta = 0.0;
  double inv_delta = 0.0;
  double tau_sq = 0.0;
  double alpha = 0.0;
  double nu = 0.0;
  std::optional<double> nu_prime;
  Regime regime = Regime::Singular;
  double residual = 0.0;  // max(|F1|, |F2|)
};

/// Sparse-model settings shared by every grid point of a sweep.
struct SweepSpec {
  double epsilon = 0.01;
  double snr = 2.0;
  double sigma = 1.0;

  double M() const { return magnitude_from_snr(snr, epsilon, sigma); }
  ModelParams at(double delta) const { return sparse_model(delta, epsilon, snr, sigma); }
};

struct SweepFailure {
  double delta = 0.0;
  std::string message;
};

struct RiskCurve {
  SweepSpec spec;
  std::vector<CurvePoint> points;  // increasing delta
  std::vector<SweepFailure> failures;

  /// Slope sign changes of tau^2 against p/n at interior points.
  int regime_changes() const {
    int n = 0;
    std::optional<Regime> prev;
    for (const auto& p : points) {
      if (p.regime == Regime::Singular) continue;
      if (prev && *prev != p.regime) ++n;
      prev = p.regime;
    }
    return n;
  }

  bool has_ascending() const {
    for (const auto& p : points)
      if (p.regime == Regime::Ascending) return true;
    return false;
  }
};

/// Log-spaced aspect ratios delta = 1 / r for r log-spaced over [r_lo, r_hi],
/// returned in increasing delta.
inline std::vector<double> delta_grid_from_ratio(double r_lo, double r_hi, int count) {
  if (!(r_lo > 0.0 && r_hi > r_lo && count >= 2))
    throw DomainError("delta_grid_from_ratio: need 0 < lo < hi and count >= 2");
  std::vector<double> out(count);
  const double l0 = std::log(r_lo), l1 = std::log(r_hi);
  for (int i = 0; i < count; ++i) {
    const double r = std::exp(l1 - (l1 - l0) * i / (count - 1));
    out[i] = 1.0 / r;
  }
  return out;
}

inline std::vector<double> default_delta_grid() { return delta_grid_from_ratio(1.01, 100.0, 400); }

inline CurvePoint solve_curve_point(const SweepSpec& spec, double delta,
                                    const SolverOptions& opt = {}) {
  const ModelParams mp = spec.at(delta);
  const SparseContext c = SparseContext::from(mp);
  const auto s = solve_interpolator(mp, opt);
  CurvePoint pt;
  pt.delta = delta;
  pt.inv_delta = 1.0 / delta;
  pt.tau_sq = s.risk();
  pt.alpha = s.alpha_star;
  pt.nu = *s.nu_star;
  pt.residual = std::max(std::abs(s.residual_f1), std::abs(s.residual_f2));
  const auto parts = nu_prime_parts(pt.nu, delta, pt.alpha, c);
  if (std::abs(parts.denominator) >= kSingularDenominator) {
    pt.nu_prime = parts.value();
    // tau^2 = M^2 / nu^2 and p/n = 1/delta, so d tau^2 / d(p/n) has the
    // sign of nu'.
    pt.regime = *pt.nu_prime < 0.0 ? Regime::Descending : Regime::Ascending;
  }
  return pt;
}

/// Solves every grid point (in parallel) and keeps the input order.  Points
/// whose solve fails are recorded in `failures` and skipped.
inline RiskCurve sweep(const SweepSpec& spec, std::vector<double> deltas, int workers = 1,
                       const SolverOptions& opt = {}) {
  std::sort(deltas.begin(), deltas.end());
  for (double d : deltas)
    if (!(d > 0.0 && d < 1.0)) throw DomainError("sweep: grid must lie in (0, 1)");
  std::vector<std::optional<CurvePoint>> slots(deltas.size());
  std::vector<std::string> errors(deltas.size());
  parallel_for(deltas.size(), workers, [&](std::size_t i) {
    try {
      slots[i] = solve_curve_point(spec, deltas[i], opt);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  RiskCurve curve;
  curve.spec = spec;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (slots[i]) curve.points.push_back(*slots[i]);
    else curve.failures.push_back({deltas[i], errors[i]});
  }
  return curve;
}

inline void write_csv(std::ostream& os, const RiskCurve& curve) {
  os << "delta,inv_delta,tau_sq,alpha,nu,nu_prime,regime\n";
  os << std::setprecision(17);
  for (const auto& p : curve.points) {
    os << p.delta << ',' << p.inv_delta << ',' << p.tau_sq << ',' << p.alpha << ','
       << p.nu << ',';
    if (p.nu_prime) os << *p.nu_prime;
    os << ',' << to_string(p.regime) << '\n';
  }
}

/// Smallest epsilon (within tol) at which the sweep at fixed SNR loses its
/// ascending regime, by bisection on the predicate.  The bracket [lo, hi] must
/// have an ascending regime at lo and none at hi.
inline double epsilon_threshold(double snr, double sigma, double lo, double hi,
                                const std::vector<double>& deltas, double tol = 1e-3,
                                int workers = 1) {
  auto ascending = [&](double eps) {
    return sweep({eps, snr, sigma}, deltas, workers).has_ascending();
  };
  if (!ascending(lo) || ascending(hi))
    throw SolverError("epsilon_threshold: predicate does not change on bracket", lo, hi);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (ascending(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Small-delta diagnostics.

struct AsymptoteRow {
  double delta = 0.0;
  double alpha = 0.0;
  double delta_alpha_over_phi = 0.0;   // -> 2
  double numerator_alpha_cubed = 0.0;  // -> -2
  double denominator_scaled = 0.0;     // denominator * (-nu0 / (4 phi(alpha))) -> 1
  double sqrt_delta_alpha = 0.0;       // -> 0
  double nu_prime = 0.0;
};

inline AsymptoteRow asymptote_row(const SweepSpec& spec, double delta,
                                  const SolverOptions& opt = {}) {
  const ModelParams mp = spec.at(delta);
  const SparseContext c = SparseContext::from(mp);
  const auto s = solve_interpolator(mp, opt);
  const double a = s.alpha_star;
  const double nu0 = c.M / std::sqrt(tau0_sq(mp));
  const auto parts = nu_prime_parts(*s.nu_star, delta, a, c);
  AsymptoteRow r;
  r.delta = delta;
  r.alpha = a;
  r.delta_alpha_over_phi = delta * a / phi(a);
  r.numerator_alpha_cubed = parts.numerator * a * a * a;
  r.denominator_scaled = parts.denominator * (-nu0 / (4.0 * phi(a)));
  r.sqrt_delta_alpha = std::sqrt(delta) * a;
  r.nu_prime = parts.value();
  return r;
}

inline std::vector<AsymptoteRow> asymptote_report(const SweepSpec& spec,
                                                  const std::vector<double>& deltas) {
  std::vector<AsymptoteRow> rows;
  rows.reserve(deltas.size());
  for (double d : deltas) rows.push_back(asymptote_row(spec, d));
  return rows;
}

/// nu*'(delta0) / M at a small epsilon with SNR held fixed; its sign as
/// epsilon -> 0 is reported, not asserted.
inline double small_eps_nu_prime_over_M(double delta0, double snr, double sigma,
                                        double epsilon) {
  const SweepSpec spec{epsilon, snr, sigma};
  const ModelParams mp = spec.at(delta0);
  const auto s = solve_interpolator(mp);
  return nu_prime(delta0, s, SparseContext::from(mp)) / spec.M();
}

}  // namespace l1risk
