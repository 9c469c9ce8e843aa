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

// Nonlinear systems whose solutions give the asymptotic risk of the minimum
// l1-norm interpolator and of the Lasso under i.i.d. Gaussian design.
//
// Two coordinate systems are used.  For a general finite prior the unknowns
// are (alpha, tau) with threshold zeta = alpha * tau:
//
//   tau^2 = sigma^2 + (1/delta) E[(eta(Theta + tau Z; alpha tau) - Theta)^2]
//   delta = P(|Theta + tau Z| > alpha tau)
//
// For the sparse two-atom prior we switch to nu = M / tau, which stays
// bounded as delta -> 1 while tau blows up.  The residuals F1 and F2 below are
// the two equations written in (nu, delta, alpha).

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "l1risk/error.hpp"
#include "l1risk/prior.hpp"
#include "l1risk/roots.hpp"
#include "l1risk/special_functions.hpp"

namespace l1risk {

struct SolverOptions {
  double root_tol = 1e-12;      // absolute, on the bisection variable
  double residual_tol = 1e-11;  // gate on |F1|, |F2| at return
  double nu_floor = 1e-14;      // lower bracket end for nu
  int max_doublings = 200;
  // Optional starting bracket for the outer variable (nu for sparse priors,
  // tau otherwise).  Expanded outward if it does not straddle the root.
  std::optional<std::pair<double, double>> outer_bracket;
};

struct FixedPointSolution {
  double alpha_star = 0.0;
  double tau_star = 0.0;
  std::optional<double> nu_star;  // M / tau_star, sparse prior only
  double zeta_star = 0.0;         // alpha_star * tau_star
  double residual_f1 = 0.0;
  double residual_f2 = 0.0;
  int iterations = 0;

  double risk() const { return tau_star * tau_star; }
};

// ---------------------------------------------------------------------------
// Per-atom Gaussian integrals.  For an atom at b (in units of tau) and
// normalized threshold alpha:

/// P(|b + Z| > alpha) = E[eta'(b + Z; alpha)].
inline double exceed_prob(double b, double alpha) {
  return Phi(-alpha + b) + Phi(-alpha - b);
}

/// E[(eta(b + Z; alpha) - b)^2], assembled from the two truncated second
/// moments of the tails plus the b^2 mass killed inside the dead zone.
inline double soft_threshold_mse(double b, double alpha) {
  const double inside = Phi(alpha - b) - Phi(-alpha - b);
  return truncated_second_moment(alpha, alpha - b) +
         truncated_second_moment(alpha, alpha + b) + b * b * inside;
}

// ---------------------------------------------------------------------------
// Sparse-prior residuals in (nu, delta, alpha).

struct SparseContext {
  double epsilon = 0.0;
  double M = 1.0;
  double sigma = 1.0;

  static SparseContext from(const ModelParams& params) {
    const auto& s = params.prior.sparse();
    if (!s) throw DomainError("sparse parameterization requires sparse_prior()");
    return {s->epsilon, s->M, params.sigma};
  }
};

inline double F1(double nu, double delta, double alpha, const SparseContext& c) {
  const double b = std::sqrt(delta) * nu;
  return c.epsilon * (Phi(-alpha + b) + Phi(-alpha - b)) +
         2.0 * (1.0 - c.epsilon) * Phi(-alpha) - delta;
}

struct F2Parts {
  double f21 = 0.0;  // sigma^2 nu^2 / M^2 - 1
  double f22 = 0.0;  // E[(eta(sqrt(delta) nu + Z; alpha) - sqrt(delta) nu)^2]
  double f23 = 0.0;  // E[eta(Z; alpha)^2]
  double total = 0.0;
};

/// F22 written out as in the closed form with b = sqrt(delta) nu.
inline double F22_closed(double nu, double delta, double alpha) {
  const double b = std::sqrt(delta) * nu;
  const double a = alpha;
  return (b - a) * phi(a + b) + (-b - a) * phi(a - b) +
         (a * a + 1.0 - b * b) * (Phi(-a - b) + Phi(-a + b)) + b * b;
}

inline double F23_closed(double alpha) {
  return 2.0 * (-alpha * phi(alpha) + (alpha * alpha + 1.0) * Phi(-alpha));
}

inline F2Parts F2_parts(double nu, double delta, double alpha,
                        const SparseContext& c) {
  F2Parts p;
  const double s = c.sigma * nu / c.M;
  p.f21 = s * s - 1.0;
  p.f22 = soft_threshold_mse(std::sqrt(delta) * nu, alpha);
  p.f23 = soft_threshold_mse(0.0, alpha);
  p.total = p.f21 + c.epsilon / delta * p.f22 + (1.0 - c.epsilon) / delta * p.f23;
  return p;
}

inline double F2(double nu, double delta, double alpha, const SparseContext& c) {
  return F2_parts(nu, delta, alpha, c).total;
}

/// The unique alpha with F1(nu, delta, alpha) = 0; F1 falls strictly from
/// 1 - delta at alpha = 0 to -delta at infinity.
inline double solve_alpha(double nu, double delta, const SparseContext& c,
                          const SolverOptions& opt = {}) {
  if (!(delta > 0.0 && delta < 1.0))
    throw DomainError("solve_alpha: delta must lie in (0, 1)");
  auto f = [&](double a) { return F1(nu, delta, a, c); };
  return bisect_decreasing_from(f, 0.0, 1.0, opt.root_tol * 1e-2,
                                opt.max_doublings)
      .root;
}

// ---------------------------------------------------------------------------
// General-prior maps in (tau, alpha).

/// P(|Theta + tau Z| > alpha tau).
inline double exceed_prob(const Prior& prior, double tau, double alpha) {
  return prior.expect([&](double v) { return exceed_prob(v / tau, alpha); });
}

/// E[(eta(Theta + tau Z; alpha tau) - Theta)^2] / tau^2.
inline double normalized_mse(const Prior& prior, double tau, double alpha) {
  return prior.expect([&](double v) { return soft_threshold_mse(v / tau, alpha); });
}

/// F(tau^2, zeta) = sigma^2 + (1/delta) E[(eta(Theta + tau Z; zeta) - Theta)^2].
inline double state_evolution_map(double tau_sq, double zeta,
                                  const ModelParams& params) {
  if (tau_sq < 0.0 || zeta < 0.0)
    throw DomainError("state_evolution_map: tau^2 and zeta must be >= 0");
  const double s2 = params.sigma * params.sigma;
  if (tau_sq == 0.0) {
    // eta(Theta; zeta) - Theta = -sign(Theta) min(|Theta|, zeta).
    const double m = params.prior.expect([&](double v) {
      const double c = std::min(std::abs(v), zeta);
      return c * c;
    });
    return s2 + m / params.delta;
  }
  const double tau = std::sqrt(tau_sq);
  return s2 + tau_sq * normalized_mse(params.prior, tau, zeta / tau) / params.delta;
}

/// alpha with P(|Theta + tau Z| > alpha tau) = delta at fixed tau.
inline double solve_alpha_at_tau(double tau, const ModelParams& params,
                                 const SolverOptions& opt = {}) {
  auto f = [&](double a) { return exceed_prob(params.prior, tau, a) - params.delta; };
  return bisect_decreasing_from(f, 0.0, 1.0, opt.root_tol * 1e-2,
                                opt.max_doublings)
      .root;
}

/// Nonnegative root of (1 + a^2) Phi(-a) - a phi(a) = delta / 2.
inline double alpha_min(double delta) {
  if (!(delta > 0.0 && delta <= 1.0))
    throw DomainError("alpha_min: delta must lie in (0, 1]");
  if (delta == 1.0) return 0.0;
  auto f = [&](double a) {
    return (1.0 + a * a) * Phi(-a) - a * phi(a) - 0.5 * delta;
  };
  return bisect_decreasing_from(f, 0.0, 1.0, 0.0).root;
}

namespace detail {

inline double alpha_floor(double delta) {
  return delta >= 1.0 ? 0.0 : alpha_min(delta);
}

inline void check_interpolator_params(const ModelParams& params) {
  params.validate();
  if (!(params.delta < 1.0))
    throw DomainError("interpolator system requires delta in (0, 1); use ols_limit for delta > 1");
  if (!(params.prior.prob_nonzero() > 0.0))
    throw DomainError("interpolator system requires P(Theta != 0) > 0");
}

// Residuals of both equations at (alpha, tau) in the normalized form used by
// FixedPointSolution: fix-2 as P(...) - delta, fix-1 divided by tau^2.
inline std::pair<double, double> general_residuals(const ModelParams& p,
                                                   double alpha, double tau) {
  const double r1 = exceed_prob(p.prior, tau, alpha) - p.delta;
  const double s = p.sigma / tau;
  const double r2 = s * s - 1.0 + normalized_mse(p.prior, tau, alpha) / p.delta;
  return {r1, r2};
}

inline FixedPointSolution solve_interpolator_sparse(const ModelParams& params,
                                                    const SolverOptions& opt) {
  const SparseContext c = SparseContext::from(params);
  const double delta = params.delta;
  auto f3 = [&](double nu) { return F2(nu, delta, solve_alpha(nu, delta, c, opt), c); };

  // F3 increases in nu: negative as nu -> 0 (tau -> inf), positive at
  // nu = M / sigma (tau = sigma).
  double lo = opt.nu_floor;
  double hi = c.M / c.sigma;
  if (opt.outer_bracket) {
    lo = std::max(opt.outer_bracket->first, opt.nu_floor);
    hi = std::max(opt.outer_bracket->second, lo * 2.0);
  }
  double f_lo = f3(lo);
  double f_hi = f3(hi);
  int steps = 0;
  while (f_lo > 0.0 && lo > opt.nu_floor) {
    if (++steps > opt.max_doublings) break;
    hi = lo;
    f_hi = f_lo;
    lo = std::max(lo * 0.5, opt.nu_floor);
    f_lo = f3(lo);
  }
  while (f_hi < 0.0) {
    if (++steps > opt.max_doublings) break;
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    f_hi = f3(hi);
  }
  if (!(f_lo <= 0.0 && f_hi >= 0.0))
    throw SolverError("solve_interpolator: no sign change of F3(nu)", lo, hi);

  const auto r = bisect(f3, lo, hi, f_lo, f_hi, opt.root_tol);
  FixedPointSolution sol;
  const double nu = r.root;
  sol.nu_star = nu;
  sol.alpha_star = solve_alpha(nu, delta, c, opt);
  sol.tau_star = c.M / nu;
  sol.zeta_star = sol.alpha_star * sol.tau_star;
  sol.residual_f1 = F1(nu, delta, sol.alpha_star, c);
  sol.residual_f2 = F2(nu, delta, sol.alpha_star, c);
  sol.iterations = r.iterations;
  return sol;
}

inline FixedPointSolution solve_interpolator_general(const ModelParams& params,
                                                     const SolverOptions& opt) {
  const double tau0 = std::sqrt(params.sigma * params.sigma +
                                second_moment(params.prior) / params.delta);
  // Residual of the first equation after eliminating alpha; positive at
  // tau = sigma, negative as tau -> infinity.
  auto r = [&](double tau) {
    const double a = solve_alpha_at_tau(tau, params, opt);
    return general_residuals(params, a, tau).second;
  };
  double lo = params.sigma;
  double hi = 10.0 * tau0;
  if (opt.outer_bracket) {
    lo = std::max(opt.outer_bracket->first, params.sigma);
    hi = std::max(opt.outer_bracket->second, lo * 1.5);
  }
  double r_lo = r(lo);
  double r_hi = r(hi);
  int steps = 0;
  while (r_lo < 0.0 && lo > params.sigma) {
    if (++steps > opt.max_doublings) break;
    hi = lo;
    r_hi = r_lo;
    lo = std::max(lo * 0.5, params.sigma);
    r_lo = r(lo);
  }
  while (r_hi > 0.0) {
    if (++steps > opt.max_doublings) break;
    lo = hi;
    r_lo = r_hi;
    hi *= 2.0;
    r_hi = r(hi);
  }
  if (!(r_lo >= 0.0 && r_hi <= 0.0))
    throw SolverError("solve_interpolator: no sign change in tau", lo, hi);
  const auto b = bisect(r, lo, hi, r_lo, r_hi, opt.root_tol);
  FixedPointSolution sol;
  sol.tau_star = b.root;
  sol.alpha_star = solve_alpha_at_tau(sol.tau_star, params, opt);
  sol.zeta_star = sol.alpha_star * sol.tau_star;
  std::tie(sol.residual_f1, sol.residual_f2) =
      general_residuals(params, sol.alpha_star, sol.tau_star);
  sol.iterations = b.iterations;
  return sol;
}

inline void gate_residuals(const FixedPointSolution& s, double tol) {
  if (!(std::abs(s.residual_f1) <= tol && std::abs(s.residual_f2) <= tol))
    throw SolverError("fixed point residual above tolerance: |F1|=" +
                      std::to_string(std::abs(s.residual_f1)) +
                      " |F2|=" + std::to_string(std::abs(s.residual_f2)));
}

}  // namespace detail

/// Unique (alpha*, tau*) of the interpolator system for delta in (0, 1).
inline FixedPointSolution solve_interpolator(const ModelParams& params,
                                             const SolverOptions& opt = {}) {
  detail::check_interpolator_params(params);
  FixedPointSolution s = params.prior.sparse()
                             ? detail::solve_interpolator_sparse(params, opt)
                             : detail::solve_interpolator_general(params, opt);
  detail::gate_residuals(s, opt.residual_tol);
  return s;
}

/// tau*(alpha): the unique root of tau^2 = F(tau^2, alpha tau), which exists
/// for alpha above alpha_min(delta).
inline double tau_of_alpha(double alpha, const ModelParams& params,
                           const SolverOptions& opt = {}) {
  params.validate();
  if (!(alpha > detail::alpha_floor(params.delta)))
    throw DomainError("tau_of_alpha: alpha must exceed alpha_min(delta)");
  // sigma^2/tau^2 - 1 + (1/delta) E[...]/tau^2: >= 0 at tau = sigma and tends
  // to F23(alpha)/delta - 1 < 0.
  auto r = [&](double tau) {
    const double s = params.sigma / tau;
    return s * s - 1.0 + normalized_mse(params.prior, tau, alpha) / params.delta;
  };
  return bisect_decreasing_from(r, params.sigma, 2.0 * params.sigma,
                                opt.root_tol * 1e-2, opt.max_doublings)
      .root;
}

/// lambda(alpha) = alpha tau*(alpha) (1 - P(|Theta + tau* Z| > alpha tau*) / delta).
inline double lambda_of_alpha(double alpha, const ModelParams& params,
                              const SolverOptions& opt = {}) {
  const double tau = tau_of_alpha(alpha, params, opt);
  return alpha * tau * (1.0 - exceed_prob(params.prior, tau, alpha) / params.delta);
}

/// Unique (alpha*(lambda), tau*(lambda)) of the Lasso system.  lambda = 0
/// delegates to the interpolator solver.
inline FixedPointSolution solve_lasso(double lambda, const ModelParams& params,
                                      const SolverOptions& opt = {}) {
  if (!(lambda >= 0.0)) throw DomainError("solve_lasso: lambda must be >= 0");
  params.validate();
  if (lambda == 0.0) return solve_interpolator(params, opt);

  const double a_min = detail::alpha_floor(params.delta);
  auto excess = [&](double a) { return lambda_of_alpha(a, params, opt) - lambda; };

  // lambda(alpha) increases from -inf (or 0 when delta > 1) at alpha_min to
  // +inf.  Walk the lower end toward alpha_min and the upper end outward.
  double lo = a_min + 1.0;
  double f_lo = excess(lo);
  int steps = 0;
  double gap = 1.0;
  while (f_lo > 0.0) {
    if (++steps > opt.max_doublings)
      throw SolverError("solve_lasso: lower bracket search failed", a_min, lo);
    gap *= 0.5;
    lo = a_min + gap;
    f_lo = excess(lo);
  }
  double hi = lo + 1.0;
  double f_hi = excess(hi);
  while (f_hi < 0.0) {
    if (++steps > opt.max_doublings)
      throw SolverError("solve_lasso: upper bracket search failed", lo, hi);
    lo = hi;
    f_lo = f_hi;
    hi = a_min + 2.0 * (hi - a_min);
    f_hi = excess(hi);
  }
  const auto r = bisect(excess, lo, hi, f_lo, f_hi, opt.root_tol);

  FixedPointSolution sol;
  sol.alpha_star = r.root;
  sol.tau_star = tau_of_alpha(sol.alpha_star, params, opt);
  sol.zeta_star = sol.alpha_star * sol.tau_star;
  if (const auto& s = params.prior.sparse()) sol.nu_star = s->M / sol.tau_star;
  const double tau = sol.tau_star;
  const double sr = params.sigma / tau;
  sol.residual_f1 = lambda_of_alpha(sol.alpha_star, params, opt) - lambda;
  sol.residual_f2 = sr * sr - 1.0 +
                    normalized_mse(params.prior, tau, sol.alpha_star) / params.delta;
  sol.iterations = r.iterations;
  return sol;
}

/// Limiting Lasso risk as lambda -> 0 for delta > 1 (least squares).
inline double ols_limit(double delta, double sigma) {
  if (!(delta > 1.0)) throw DomainError("ols_limit: delta must exceed 1");
  return delta / (delta - 1.0) * sigma * sigma;
}

/// Asymptotic risk of the minimum l1-norm interpolator at any delta != 1.
inline double interpolator_risk(const ModelParams& params,
                                const SolverOptions& opt = {}) {
  if (params.delta == 1.0) throw DomainError("risk is infinite at delta = 1");
  if (params.delta > 1.0) return ols_limit(params.delta, params.sigma);
  return solve_interpolator(params, opt).risk();
}

}  // namespace l1risk
