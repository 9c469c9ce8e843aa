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


// Acceptance suite: one PASS/FAIL line per criterion.  Exits nonzero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "l1risk/l1risk.hpp"

namespace {

using namespace l1risk;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void check(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && secs > budget_s) {
    o.pass = false;
    o.detail += fmt(" (over the %.0f s budget)", budget_s);
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

const double kEps[] = {0.01, 0.05, 0.2, 0.5};
const double kSnr[] = {0.5, 2.0, 10.0};

std::vector<double> delta_grid10() {
  std::vector<double> d(10);
  for (int i = 0; i < 10; ++i) d[i] = 0.05 + 0.1 * i;
  return d;
}

Outcome fixed_point_correctness() {
  double worst_res = 0.0, worst_diff = 0.0;
  int points = 0;
  for (double eps : kEps)
    for (double snr : kSnr)
      for (double delta : delta_grid10()) {
        const auto mp = sparse_model(delta, eps, snr, 1.0);
        const auto a = solve_interpolator(mp);
        SolverOptions moved;
        moved.outer_bracket = std::make_pair(0.37 * *a.nu_star, 0.61 * *a.nu_star);
        const auto b = solve_interpolator(mp, moved);
        SolverOptions wide;
        wide.outer_bracket = std::make_pair(1e-6, 1e3);
        const auto c = solve_interpolator(mp, wide);
        worst_res = std::max({worst_res, std::abs(a.residual_f1), std::abs(a.residual_f2)});
        worst_diff = std::max({worst_diff, std::abs(a.tau_star - b.tau_star),
                               std::abs(a.alpha_star - b.alpha_star),
                               std::abs(a.tau_star - c.tau_star),
                               std::abs(a.alpha_star - c.alpha_star)});
        ++points;
      }
  return {worst_res <= 1e-10 && worst_diff <= 1e-8,
          fmt("%d points, max residual %.2e, max bracket disagreement %.2e", points, worst_res,
              worst_diff)};
}

Outcome small_delta_limit() {
  const std::pair<double, double> settings[] = {{0.3, 10.0}, {0.05, 4.0}, {0.01, 2.0}};
  bool ok = true;
  std::string d;
  for (auto [eps, snr] : settings) {
    const double got = solve_interpolator(sparse_model(1e-3, eps, snr, 1.0)).risk();
    const double want = 1.0 + snr;
    const double rel = std::abs(got - want) / want;
    ok = ok && rel <= 0.01;
    d += fmt("(eps %g, SNR %g) tau*^2 %.4f vs %.4f rel %.3f; ", eps, snr, got, want, rel);
  }
  return {ok, d};
}

Outcome near_one_behavior() {
  // eps 0.5, M 2.
  const auto mp = sparse_model(0.999, 0.5, 2.0, 1.0);
  const auto s = solve_interpolator(mp);
  const double np = nu_prime(0.999, s, SparseContext::from(mp));
  const bool ok = s.alpha_star <= 0.05 && *s.nu_star <= 0.1 && np <= -10.0;
  return {ok, fmt("eps 0.5, M %.3g: alpha* %.4g, nu* %.4g, nu' %.4g", SweepSpec{0.5, 2.0, 1.0}.M(), s.alpha_star,
                  *s.nu_star, np)};
}

Outcome asymptotic_constants() {
  const auto r = asymptote_row({0.3, 10.0, 1.0}, 1e-4);
  const bool ok = r.delta_alpha_over_phi >= 1.8 && r.delta_alpha_over_phi <= 2.2 &&
                  r.numerator_alpha_cubed >= -2.6 && r.numerator_alpha_cubed <= -1.4 &&
                  r.denominator_scaled >= 0.9 && r.denominator_scaled <= 1.1;
  return {ok, fmt("delta alpha/phi %.4f, numerator alpha^3 %.4f, scaled denominator %.4f",
                  r.delta_alpha_over_phi, r.numerator_alpha_cubed, r.denominator_scaled)};
}

Outcome derivative_consistency() {
  std::mt19937_64 rng(20260);
  std::uniform_real_distribution<double> ud(0.05, 0.95);
  std::uniform_int_distribution<int> ue(0, 3), us(0, 2);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double delta = ud(rng), eps = kEps[ue(rng)], snr = kSnr[us(rng)];
    const SweepSpec spec{eps, snr, 1.0};
    const auto mp = spec.at(delta);
    const auto s = solve_interpolator(mp);
    const double analytic = nu_prime(delta, s, SparseContext::from(mp));
    const double h = 1e-5 * delta;
    const double fd = (*solve_interpolator(spec.at(delta + h)).nu_star -
                       *solve_interpolator(spec.at(delta - h)).nu_star) /
                      (2 * h);
    worst = std::max(worst, std::abs(analytic - fd) / std::max(std::abs(fd), 1e-6));
  }
  return {worst <= 1e-3, fmt("50 points, max relative gap %.2e", worst)};
}

Outcome lasso_continuity() {
  double worst = 0.0, worst_small = 0.0, at = 0.0;
  for (double eps : kEps)
    for (double snr : kSnr)
      for (double delta : delta_grid10()) {
        const auto mp = sparse_model(delta, eps, snr, 1.0);
        const double t0 = solve_interpolator(mp).tau_star;
        const double gap = std::abs(solve_lasso(1e-4, mp).tau_star - t0);
        if (gap > worst) {
          worst = gap;
          at = delta;
        }
        worst_small = std::max(worst_small, std::abs(solve_lasso(1e-5, mp).tau_star - t0));
      }
  const double ols = ols_limit(2.0, 1.0);
  return {worst <= 1e-2 && ols == 2.0,
          fmt("max |tau*(1e-4) - tau*(0)| %.2e at delta %.2f (%.2e at lambda 1e-5), "
              "ols_limit(2, 1) = %.17g",
              worst, at, worst_small, ols)};
}

Outcome limit_functions() {
  const double h_small = H_fn(1e-6), h_big = H_fn(1.0 - 1e-6);
  double worst = 0.0;
  for (int i = 1; i <= 10; ++i) {
    const double d = 0.09 * i;
    worst = std::max(worst, std::abs(eps_to_zero_limits(d).nu_over_M - H_fn(d)));
  }
  return {h_small >= 0.999 && h_big <= 0.02 && worst <= 1e-10,
          fmt("H(1e-6) %.6f, H(1-1e-6) %.3e, max |nu/M - H| %.2e", h_small, h_big, worst)};
}

Outcome state_evolution() {
  const auto mp = sparse_model(0.25, 0.05, 4.0, 1.0);
  // Constant lambda: per-step contraction from t = 1 on.
  double worst_excess = -1.0;
  for (double lam : {0.5, 0.1, 0.0}) {
    const auto run = state_evolution_run(ConstantSchedule(lam), mp, 60);
    const double ts = std::pow(solve_lasso(lam, mp).tau_star, 2);
    const double eta = 1.0 - mp.sigma * mp.sigma / ts;
    for (std::size_t t = 1; t + 1 < run.rows.size(); ++t)
      worst_excess = std::max(worst_excess, std::abs(run.rows[t + 1].tau_sq - ts) -
                                                eta * std::abs(run.rows[t].tau_sq - ts));
  }
  // Decaying schedule.
  const LambdaSchedule sched(2e-4, 2e-4);
  const auto T = sched.first_below(1e-4);
  const auto dec = state_evolution_run(sched, mp, static_cast<int>(T) + 100);
  const double gap =
      std::abs(std::sqrt(dec.rows.back().tau_sq) - solve_interpolator(mp).tau_star);
  // Covariance diagonal.
  StateEvolutionOptions opt;
  opt.track_covariance = true;
  const auto cov = state_evolution_run(LambdaSchedule(0.05, 0.05), mp, 40, opt);
  double diag = 0.0;
  for (std::size_t t = 0; t < cov.rows.size(); ++t)
    diag = std::max(diag, std::abs(cov.covariance_diag[t] - cov.rows[t].tau_sq));
  return {worst_excess <= 1e-9 && gap <= 1e-4 && diag <= 1e-6,
          fmt("contraction excess %.2e, |tau_T - tau*| %.2e at T = %lld, max |R_tt - tau_t^2| "
              "%.2e",
              worst_excess, gap, static_cast<long long>(T) + 100, diag)};
}

Outcome amp_vs_interpolator() {
  const SweepSpec spec{0.05, 4.0, 1.0};
  const int n = 100, p = 400;
  const auto inst = gen_instance(n, p, spec, 1);
  const auto bp = min_l1_interpolator(inst.X, inst.y);
  const auto mp = spec.at(0.25);
  const double tau_sq = solve_interpolator(mp).risk();
  AmpOptions opt;
  opt.lambda_stop = 0.025;
  opt.max_iter = 3000;
  try {
    const auto run = run_amp(inst.X, inst.y, mp, LambdaSchedule(0.05, 0.05), opt);
    const double dist = (run.theta - bp.theta).squaredNorm() / p;
    const double sg = run.trace.back().sg_score;
    return {dist <= 0.02 * tau_sq && sg <= 0.1,
            fmt("T %d, lambda_T %.4f, distance/tau*^2 %.4f (need 0.02), subgradient score %.3g "
                "(need 0.1), support %.3f",
                run.t, run.lambda, dist / tau_sq, sg, support_fraction(run.theta))};
  } catch (const DivergenceError& e) {
    return {false, fmt("diverged after %zu steps", e.trace().size())};
  }
}

Outcome figure_reproduction() {
  SimConfig cfg;
  cfg.spec = {0.01, 2.0, 1.0};
  cfg.p_over_n = {2.0, 5.0, 10.0, 50.0};
  cfg.n = 100;
  cfg.trials = 30;
  cfg.seed = 1;
  cfg.workers = default_workers();
  const auto res = figure_sweep(cfg);
  bool ok = res.failures.empty();
  std::string d;
  for (const auto& a : res.aggregates) {
    const double rel = std::abs(a.mean_risk - a.theory_risk) / a.theory_risk;
    const double z = std::abs(a.mean_zero_risk - a.tau0_sq) / a.stderr_zero_risk;
    ok = ok && a.trials == 30 && rel <= 0.10 && z <= 3.0;
    d += fmt("p/n %g: MC %.3f+-%.3f theory %.3f rel %.3f, zero-risk z %.2f; ", a.p_over_n,
             a.mean_risk, a.stderr_risk, a.theory_risk, rel, z);
  }
  if (!res.failures.empty()) d += fmt("%zu failed trials", res.failures.size());
  return {ok, d};
}

Outcome multi_descent() {
  const auto curve = sweep({0.01, 2.0, 1.0}, default_delta_grid(), default_workers());
  // tau*^2 as a function of p/n, increasing p/n.
  std::vector<double> r, v;
  for (auto it = curve.points.rbegin(); it != curve.points.rend(); ++it) {
    r.push_back(it->inv_delta);
    v.push_back(it->tau_sq);
  }
  int maxima = 0, minima = 0;
  double first_max = 0.0, first_min = 0.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    if (v[i] > v[i - 1] && v[i] > v[i + 1] && !maxima++) first_max = r[i];
    if (v[i] < v[i - 1] && v[i] < v[i + 1] && !minima++) first_min = r[i];
  }
  return {curve.failures.empty() && maxima >= 1 && minima >= 1,
          fmt("%zu points, %d interior maxima (first at p/n %.3g), %d interior minima (first at "
              "p/n %.3g)",
              curve.points.size(), maxima, first_max, minima, first_min)};
}

double enumerate_min_l1(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const int n = static_cast<int>(X.rows()), p = static_cast<int>(X.cols());
  std::vector<bool> pick(p, false);
  std::fill(pick.begin(), pick.begin() + n, true);
  double best = std::numeric_limits<double>::infinity();
  do {
    Eigen::MatrixXd XS(n, n);
    for (int j = 0, k = 0; j < p; ++j)
      if (pick[j]) XS.col(k++) = X.col(j);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(XS);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd t = lu.solve(y);
    if ((XS * t - y).norm() > 1e-10 * y.norm()) continue;
    best = std::min(best, t.lpNorm<1>());
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<int> un(1, 6);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const int n = un(rng);
    const int p = std::uniform_int_distribution<int>(n + 1, 12)(rng);
    const auto inst = gen_instance(n, p, sparse_prior(0.3, 2.0, 1.0), 0.5, 4242, rep);
    const auto bp = min_l1_interpolator(inst.X, inst.y);
    worst = std::max(worst, std::abs(bp.theta.lpNorm<1>() - enumerate_min_l1(inst.X, inst.y)));
  }
  return {worst <= 1e-6, fmt("20 instances, max l1 gap %.2e", worst)};
}

Outcome gaussian_identities() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng);
    const double q =
        integrate_adaptive([a](double z) { return (z - a) * (z - a) * phi(z); }, b, 40.0, {}, 1e-15);
    worst = std::max(worst, std::abs(truncated_second_moment(a, b) - q));
  }
  const double x = 12.0;
  const double r1 = x * Phi(-x) / phi(x);
  const double r2 = x * x * g_fn(x) / phi(x);
  const double r3 = x * x * x * (x * phi(x) - (x * x + 1.0) * Phi(-x)) / phi(x);
  const bool ok = worst <= 1e-10 && std::abs(r1 - 1.0) <= 0.05 && std::abs(r2 - 1.0) <= 0.05 &&
                  std::abs(r3 + 2.0) <= 0.1;
  return {ok, fmt("max quadrature gap %.2e; ratios at 12: %.4f, %.4f, %.4f", worst, r1, r2, r3)};
}

}  // namespace

int main() {
  check(1, "fixed-point correctness", 30, fixed_point_correctness);
  check(2, "small-delta limit", 10, small_delta_limit);
  check(3, "behavior near delta = 1", 0, near_one_behavior);
  check(4, "asymptotic constants at delta = 1e-4", 0, asymptotic_constants);
  check(5, "derivative consistency", 0, derivative_consistency);
  check(6, "Lasso continuity and least-squares branch", 0, lasso_continuity);
  check(7, "limit functions", 0, limit_functions);
  check(8, "state evolution", 0, state_evolution);
  check(9, "AMP vs exact interpolator", 120, amp_vs_interpolator);
  check(10, "desk-scale Monte Carlo reproduction", 600, figure_reproduction);
  check(11, "multi-descent detection", 0, multi_descent);
  check(12, "oracle equivalence", 0, oracle_equivalence);
  check(13, "Gaussian identities", 0, gaussian_identities);
  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
