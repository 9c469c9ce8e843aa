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

// Approximate message passing toward the minimum l1-norm interpolator.
//
// The threshold at iteration t is zeta_t = alpha*_t tau_t, where alpha*_t
// solves the Lasso fixed point at lambda_t and tau_t follows state
// evolution.  lambda_t decays along a piecewise-constant schedule, so the
// iterates track Lasso solutions with vanishing penalty.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "l1risk/error.hpp"
#include "l1risk/fixed_point.hpp"
#include "l1risk/prior.hpp"
#include "l1risk/special_functions.hpp"

namespace l1risk {

// ---------------------------------------------------------------------------
// Regularization schedule.

/// Piecewise-constant lambda_t = mu_k on piece k, with
///   mu_k = mu_scale / max(log k, 1),   Lambda_{S_k} = sum_{t <= S_k} lambda_t = lambda_scale k^3.
/// Piece lengths s_k = round((Lambda_{S_k} - Lambda_{S_{k-1}}) / mu_k), at
/// least 1.  Both scales equal 1 in the reference construction; shrinking
/// mu_scale reaches small lambda without astronomically many pieces, and
/// shrinking lambda_scale shortens the pieces.  Pieces are generated on demand.
class LambdaSchedule {
 public:
  explicit LambdaSchedule(double mu_scale = 1.0, double lambda_scale = 1.0)
      : mu_scale_(mu_scale), lambda_scale_(lambda_scale) {
    if (!(mu_scale > 0.0) || !(lambda_scale > 0.0))
      throw DomainError("LambdaSchedule: scales must be positive");
  }

  double mu_scale() const { return mu_scale_; }
  double lambda_scale() const { return lambda_scale_; }

  /// mu_k for k >= 1.
  double piece_value(std::int64_t k) const {
    if (k < 1) throw DomainError("LambdaSchedule: piece index starts at 1");
    return mu_scale_ / std::max(std::log(static_cast<double>(k)), 1.0);
  }

  /// s_k for k >= 1.
  std::int64_t piece_length(std::int64_t k) const {
    const double kk = static_cast<double>(k);
    const double mass = lambda_scale_ * (kk * kk * kk - (kk - 1) * (kk - 1) * (kk - 1));
    return std::max<std::int64_t>(1, std::llround(mass / piece_value(k)));
  }

  /// S_k, the last iteration of piece k.
  std::int64_t piece_end(std::int64_t k) const {
    extend_to_piece(k);
    return ends_[k - 1];
  }

  /// Piece index containing iteration t >= 1.
  std::int64_t piece_of(std::int64_t t) const {
    if (t < 1) throw DomainError("LambdaSchedule: iterations start at 1");
    while (ends_.empty() || ends_.back() < t) extend_to_piece(ends_.size() + 1);
    return std::lower_bound(ends_.begin(), ends_.end(), t) - ends_.begin() + 1;
  }

  double lambda(std::int64_t t) const { return piece_value(piece_of(t)); }

  /// Lambda_t = sum_{s <= t} lambda_s.
  double partial_sum(std::int64_t t) const {
    if (t <= 0) return 0.0;
    const std::int64_t k = piece_of(t);
    return sums_[k - 1] - static_cast<double>(ends_[k - 1] - t) * piece_value(k);
  }

  /// First iteration whose lambda is at most the target.
  std::int64_t first_below(double target) const {
    if (!(target > 0.0)) throw DomainError("LambdaSchedule: target must be positive");
    std::int64_t k = 1;
    if (piece_value(1) > target) {
      // mu_k <= target once log k >= mu_scale / target.
      k = static_cast<std::int64_t>(std::ceil(std::exp(mu_scale_ / target)));
      while (k > 1 && piece_value(k - 1) <= target) --k;
      while (piece_value(k) > target) ++k;
    }
    return k == 1 ? 1 : piece_end(k - 1) + 1;
  }

  /// l_t = sum_{s <= t} |lambda_s - lambda_{s+1}| exp(-c (Lambda_t - Lambda_s)),
  /// reported as a diagnostic only.  Only piece boundaries contribute.
  double l_diagnostic(std::int64_t t, double c = 1.0) const {
    if (t < 1) return 0.0;
    const double lt = partial_sum(t);
    double total = 0.0;
    for (std::int64_t k = 1;; ++k) {
      const std::int64_t s = piece_end(k);
      if (s > t) break;
      total += std::abs(piece_value(k) - piece_value(k + 1)) *
               std::exp(-c * (lt - partial_sum(s)));
    }
    return total;
  }

 private:
  void extend_to_piece(std::int64_t k) const {
    while (static_cast<std::int64_t>(ends_.size()) < k) {
      const std::int64_t j = ends_.size() + 1;
      const std::int64_t len = piece_length(j);
      const std::int64_t prev_end = ends_.empty() ? 0 : ends_.back();
      const double prev_sum = sums_.empty() ? 0.0 : sums_.back();
      ends_.push_back(prev_end + len);
      sums_.push_back(prev_sum + static_cast<double>(len) * piece_value(j));
    }
  }

  double mu_scale_;
  double lambda_scale_;
  mutable std::vector<std::int64_t> ends_;  // S_k
  mutable std::vector<double> sums_;        // Lambda_{S_k}
};

inline LambdaSchedule example_schedule() { return LambdaSchedule(1.0, 1.0); }

/// lambda_t = value for every t.
class ConstantSchedule {
 public:
  explicit ConstantSchedule(double value) : value_(value) {
    if (!(value >= 0.0)) throw DomainError("ConstantSchedule: lambda must be >= 0");
  }
  double lambda(std::int64_t) const { return value_; }

 private:
  double value_;
};

template <class S>
concept Schedule = requires(const S& s, std::int64_t t) {
  { s.lambda(t) } -> std::convertible_to<double>;
};

// ---------------------------------------------------------------------------
// Per-iteration fixed points.

/// (alpha*_t, tau*_t) for a given lambda_t, memoized on the last value since
/// lambda_t is constant within a piece.
class FixedPointCache {
 public:
  explicit FixedPointCache(ModelParams params, SolverOptions opt = {})
      : params_(std::move(params)), opt_(opt) {}

  const FixedPointSolution& at(double lambda) {
    if (!last_ || last_->first != lambda) last_.emplace(lambda, solve_lasso(lambda, params_, opt_));
    return last_->second;
  }

  const ModelParams& params() const { return params_; }

 private:
  ModelParams params_;
  SolverOptions opt_;
  std::optional<std::pair<double, FixedPointSolution>> last_;
};

inline FixedPointSolution per_iteration_fixed_point(double lambda_t, const ModelParams& params,
                                                    const SolverOptions& opt = {}) {
  return solve_lasso(lambda_t, params, opt);
}

// ---------------------------------------------------------------------------
// Covariance of the effective noise across iterations.

namespace detail {

// E[eta(X; zeta)] for X ~ N(m, s^2).
inline double soft_threshold_mean(double m, double s, double zeta) {
  if (s <= 0.0) return soft_threshold(m, zeta);
  const double u = (m - zeta) / s;
  const double l = (-m - zeta) / s;
  return (m - zeta) * Phi(u) + s * phi(u) - ((-m - zeta) * Phi(l) + s * phi(l));
}

}  // namespace detail

/// R_{s,t} over a sliding window of the most recent iterations.
///
/// R_{0,0} = tau_0^2; R_{0,t+1} = sigma^2 + (1/delta) E[(eta(Theta + Z_t; zeta_t) - Theta)(-Theta)];
/// R_{s+1,t+1} = sigma^2 + (1/delta) E[(eta(Theta + Z_s; zeta_s) - Theta)(eta(Theta + Z_t; zeta_t) - Theta)]
/// with (Z_s, Z_t) centered Gaussian of covariance [[R_ss, R_st], [R_st, R_tt]].
/// The outer expectation over Z_s is a kink-aware adaptive integral; the
/// inner one over Z_t given Z_s is closed form.
class CovarianceTrace {
 public:
  explicit CovarianceTrace(ModelParams params, int window = 64)
      : params_(std::move(params)), window_(window) {
    if (window < 2) throw DomainError("CovarianceTrace: window must be >= 2");
    R_[{0, 0}] = params_.sigma * params_.sigma + second_moment(params_.prior) / params_.delta;
    last_ = 0;
  }

  int last() const { return last_; }
  int clipped() const { return clipped_; }
  int window() const { return window_; }

  /// R_{s,t} for s, t inside the window.
  double at(int s, int t) const {
    const auto it = R_.find({std::min(s, t), std::max(s, t)});
    if (it == R_.end()) throw DomainError("CovarianceTrace: entry outside window");
    return it->second;
  }

  bool contains(int s, int t) const { return R_.count({std::min(s, t), std::max(s, t)}) > 0; }

  /// Appends row last()+1 given the thresholds zeta_0..zeta_last (only the
  /// window tail is read).
  void advance(const std::vector<double>& zetas) {
    const int t = last_;
    if (static_cast<int>(zetas.size()) <= t) throw DomainError("CovarianceTrace: missing zeta");
    const int first = std::max(0, t + 1 - window_ + 1);
    std::map<std::pair<int, int>, double> row;
    for (int s1 = first; s1 <= t + 1; ++s1) row[{s1, t + 1}] = covariance_step(s1, t + 1, zetas);
    for (const auto& kv : row) R_[kv.first] = kv.second;
    last_ = t + 1;
    // Drop entries that slid out of the window.
    for (auto it = R_.begin(); it != R_.end();) {
      if (it->first.first < last_ - window_ + 1) it = R_.erase(it);
      else ++it;
    }
  }

  /// R_{s1, t1} for s1 <= t1 = last()+1 from stored entries of the previous row.
  double covariance_step(int s1, int t1, const std::vector<double>& zetas) {
    const double s2 = params_.sigma * params_.sigma;
    const double inv_delta = 1.0 / params_.delta;
    const int t = t1 - 1;
    const double Rtt = at(t, t);
    const double zt = zetas[t];
    const double sd_t = std::sqrt(Rtt);
    if (s1 == 0) {
      // E[(eta(v + Z_t) - v)(-v)] per atom, closed form in Z_t.
      const double m = params_.prior.expect([&](double v) {
        return -v * (detail::soft_threshold_mean(v, sd_t, zt) - v);
      });
      return s2 + inv_delta * m;
    }
    const int s = s1 - 1;
    const double Rss = at(s, s);
    const double zs = zetas[s];
    const double sd_s = std::sqrt(Rss);
    double rho = at(s, t) / (sd_s * sd_t);
    if (std::abs(rho) > 1.0 - 1e-12 && s != t) {
      if (std::abs(rho) > 1.0) ++clipped_;
      rho = std::copysign(std::min(std::abs(rho), 1.0 - 1e-12), rho);
    }
    if (s == t) rho = 1.0;
    const double cond_sd = sd_t * std::sqrt(std::max(0.0, 1.0 - rho * rho));
    const double slope = rho * sd_t / sd_s;
    // Integrate over x = Z_s on the whole line: eta(v + x; zs) - v equals -v
    // on the dead zone, which is nonzero for v != 0.
    const double m = params_.prior.expect([&](double v) {
      auto g = [&](double x) {
        const double a = soft_threshold(v + x, zs) - v;
        const double b = detail::soft_threshold_mean(v + slope * x, cond_sd, zt) - v;
        return a * b * phi(x / sd_s) / sd_s;
      };
      const double w = 40.0 * sd_s;
      const double cuts[] = {-zs - v, zs - v};
      return integrate_adaptive(g, -w, w, cuts, 1e-13);
    });
    return s2 + inv_delta * m;
  }

 private:
  ModelParams params_;
  int window_;
  std::map<std::pair<int, int>, double> R_;
  int last_ = 0;
  int clipped_ = 0;
};

// ---------------------------------------------------------------------------
// State evolution.

struct StateEvolutionRow {
  int t = 0;
  double lambda = 0.0;  // lambda_t (0 at t = 0)
  double alpha_star = 0.0;
  double tau_star = 0.0;
  double tau_sq = 0.0;  // tau_t^2
  double zeta = 0.0;    // zeta_t
};

struct StateEvolutionOptions {
  bool track_covariance = false;
  int window = 64;
  SolverOptions solver;
};

struct StateEvolutionResult {
  std::vector<StateEvolutionRow> rows;  // t = 0..T
  std::vector<double> covariance_diag;  // R_{t,t}, when tracked
  int clipped = 0;
};

/// tau_0^2 = sigma^2 + E[Theta^2]/delta, zeta_0 = 1, and for t >= 1
/// zeta_t = alpha*(lambda_t) tau_t, tau_{t+1}^2 = F(tau_t^2, zeta_t).
template <Schedule S>
StateEvolutionResult state_evolution_run(const S& schedule,
                                                const ModelParams& params, int T,
                                                const StateEvolutionOptions& opt = {}) {
  if (T < 1) throw DomainError("state_evolution_run: T must be >= 1");
  params.validate();
  FixedPointCache fp(params, opt.solver);
  StateEvolutionResult out;
  std::optional<CovarianceTrace> cov;
  std::vector<double> zetas;
  if (opt.track_covariance) cov.emplace(params, opt.window);

  StateEvolutionRow row;
  row.tau_sq = params.sigma * params.sigma + second_moment(params.prior) / params.delta;
  row.zeta = 1.0;
  out.rows.push_back(row);
  zetas.push_back(row.zeta);
  if (cov) out.covariance_diag.push_back(cov->at(0, 0));
  for (int t = 1; t <= T; ++t) {
    const auto& prev = out.rows.back();
    StateEvolutionRow r;
    r.t = t;
    r.tau_sq = state_evolution_map(prev.tau_sq, prev.zeta, params);
    r.lambda = schedule.lambda(t);
    const auto& s = fp.at(r.lambda);
    r.alpha_star = s.alpha_star;
    r.tau_star = s.tau_star;
    r.zeta = r.alpha_star * std::sqrt(r.tau_sq);
    if (cov) {
      cov->advance(zetas);
      out.covariance_diag.push_back(cov->at(t, t));
    }
    out.rows.push_back(r);
    zetas.push_back(r.zeta);
  }
  if (cov) out.clipped = cov->clipped();
  return out;
}

// ---------------------------------------------------------------------------
// AMP on a concrete instance.

struct AmpTraceRow {
  int t = 0;
  double lambda = 0.0;
  double zeta = 0.0;
  double tau_t = 0.0;
  double alpha_star_t = 0.0;
  double tau_star_t = 0.0;
  double increment = 0.0;  // ||theta^t - theta^{t-1}||^2 / (p lambda_t^2)
  double sg_score = 0.0;
};

class DivergenceError : public SolverError {
 public:
  DivergenceError(const std::string& what, std::vector<AmpTraceRow> trace)
      : SolverError(what), trace_(std::move(trace)) {}
  const std::vector<AmpTraceRow>& trace() const { return trace_; }

 private:
  std::vector<AmpTraceRow> trace_;
};

struct AmpRun {
  Eigen::VectorXd theta;       // theta^t
  Eigen::VectorXd z;           // z^{t-1} (zero before the first step)
  Eigen::VectorXd theta_prev;  // theta^{t-1}
  Eigen::VectorXd pseudo_prev; // X^T z^{t-1} + theta^{t-1}
  double deriv_mean_prev = 0.0;  // < eta'(pseudo_prev; zeta_{t-1}) >
  int t = 0;
  double tau_sq = 0.0;  // tau_t^2
  double zeta = 1.0;    // zeta_t
  double zeta_prev = 0.0;
  double lambda = 0.0;  // lambda_t (undefined at t = 0)
  double alpha_star = 0.0;
  double tau_star = 0.0;
  std::vector<AmpTraceRow> trace;

  static AmpRun start(Eigen::Index n, Eigen::Index p, const ModelParams& params) {
    AmpRun r;
    r.theta = Eigen::VectorXd::Zero(p);
    r.z = Eigen::VectorXd::Zero(n);
    r.theta_prev = Eigen::VectorXd::Zero(p);
    r.pseudo_prev = Eigen::VectorXd::Zero(p);
    r.tau_sq = params.sigma * params.sigma + second_moment(params.prior) / params.delta;
    r.zeta = 1.0;
    return r;
  }
};

/// ||lambda s - X^T (y - X theta)||_2 / (sqrt(p) lambda) for a sign vector s.
inline double subgradient_score(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                const Eigen::Ref<const Eigen::VectorXd>& y,
                                const Eigen::Ref<const Eigen::VectorXd>& theta,
                                const Eigen::Ref<const Eigen::VectorXd>& s, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("subgradient_score: lambda must be positive");
  const Eigen::VectorXd sg = lambda * s - X.transpose() * (y - X * theta);
  return sg.norm() / (std::sqrt(static_cast<double>(theta.size())) * lambda);
}

/// Subgradient score of the current AMP iterate, with
/// s^t = (theta^{t-1} + X^T z^{t-1} - theta^t) / zeta_{t-1}.
inline double subgradient_score(const AmpRun& run, const Eigen::Ref<const Eigen::MatrixXd>& X,
                                const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (run.t < 1) throw DomainError("subgradient_score: needs t >= 1");
  const Eigen::VectorXd s = (run.pseudo_prev - run.theta) / run.zeta_prev;
  return subgradient_score(X, y, run.theta, s, run.lambda);
}

/// One synchronous AMP update theta^t -> theta^{t+1}, with the Onsager term,
/// followed by state evolution tau_{t+1}^2 = F(tau_t^2, zeta_t) and the new
/// threshold zeta_{t+1} = alpha*(lambda_{t+1}) tau_{t+1}.
template <Schedule S>
void amp_step(AmpRun& run, const Eigen::Ref<const Eigen::MatrixXd>& X,
              const Eigen::Ref<const Eigen::VectorXd>& y, const S& schedule,
              FixedPointCache& fp) {
  const auto& params = fp.params();
  const double n = static_cast<double>(X.rows());
  const double p = static_cast<double>(X.cols());
  // z^t = y - X theta^t + (1/delta) z^{t-1} <eta'(...)>; 1/delta = p/n.
  Eigen::VectorXd z = y - X * run.theta + (p / n) * run.deriv_mean_prev * run.z;
  Eigen::VectorXd pseudo = X.transpose() * z + run.theta;
  Eigen::VectorXd next = pseudo.unaryExpr([&](double x) { return soft_threshold(x, run.zeta); });
  const double active =
      static_cast<double>((pseudo.array().abs() > run.zeta).count());

  run.theta_prev = std::move(run.theta);
  run.theta = std::move(next);
  run.z = std::move(z);
  run.pseudo_prev = std::move(pseudo);
  run.deriv_mean_prev = active / p;
  run.zeta_prev = run.zeta;
  run.tau_sq = state_evolution_map(run.tau_sq, run.zeta, params);
  run.t += 1;
  run.lambda = schedule.lambda(run.t);
  const auto& s = fp.at(run.lambda);
  run.alpha_star = s.alpha_star;
  run.tau_star = s.tau_star;
  run.zeta = run.alpha_star * std::sqrt(run.tau_sq);

  AmpTraceRow row;
  row.t = run.t;
  row.lambda = run.lambda;
  row.zeta = run.zeta;
  row.tau_t = std::sqrt(run.tau_sq);
  row.alpha_star_t = run.alpha_star;
  row.tau_star_t = run.tau_star;
  row.increment = (run.theta - run.theta_prev).squaredNorm() / (p * run.lambda * run.lambda);
  row.sg_score = subgradient_score(run, X, y);
  run.trace.push_back(row);
  if (!run.theta.allFinite() || !run.z.allFinite() || !std::isfinite(row.sg_score))
    throw DivergenceError("amp_step: non-finite iterate at t = " + std::to_string(run.t),
                          run.trace);
}

struct AmpOptions {
  double lambda_stop = 1e-2;
  double increment_stop = 5e-2;
  int max_iter = 100000;
  SolverOptions solver;
};

/// Runs AMP until lambda_t <= lambda_stop and the normalized increment is at
/// most increment_stop, or max_iter steps.
template <Schedule S>
AmpRun run_amp(const Eigen::Ref<const Eigen::MatrixXd>& X,
               const Eigen::Ref<const Eigen::VectorXd>& y, const ModelParams& params,
               const S& schedule, const AmpOptions& opt = {}) {
  if (X.rows() != y.size()) throw DomainError("run_amp: X rows must match y");
  FixedPointCache fp(params, opt.solver);
  AmpRun run = AmpRun::start(X.rows(), X.cols(), params);
  while (run.t < opt.max_iter) {
    amp_step(run, X, y, schedule, fp);
    const auto& last = run.trace.back();
    if (last.lambda <= opt.lambda_stop && last.increment <= opt.increment_stop) break;
  }
  return run;
}

inline void write_trace_csv(std::ostream& os, const std::vector<AmpTraceRow>& trace) {
  os << "t,lambda,zeta,tau_t,alpha_star_t,tau_star_t,increment,sg_score\n";
  os << std::setprecision(17);
  for (const auto& r : trace)
    os << r.t << ',' << r.lambda << ',' << r.zeta << ',' << r.tau_t << ',' << r.alpha_star_t
       << ',' << r.tau_star_t << ',' << r.increment << ',' << r.sg_score << '\n';
}

}  // namespace l1risk
