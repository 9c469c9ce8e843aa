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

// Finite-sample experiments: random instances, basis pursuit, Lasso by
// coordinate descent, and risk sweeps over p/n.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "l1risk/error.hpp"
#include "l1risk/fixed_point.hpp"
#include "l1risk/parallel.hpp"
#include "l1risk/prior.hpp"
#include "l1risk/risk_curve.hpp"
#include "l1risk/special_functions.hpp"

namespace l1risk {

// ---------------------------------------------------------------------------
// Counter-based random numbers (Philox4x32-10).

class Philox {
 public:
  using Block = std::array<std::uint32_t, 4>;

  /// Stream keyed by (seed, trial, tag); draws are a pure function of the
  /// key and the draw index.
  Philox(std::uint64_t seed, std::uint64_t trial, std::uint32_t tag)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        trial_(trial),
        tag_(tag) {}

  static Block round10(Block ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }

  /// 53-bit uniform on (0, 1).
  double uniform() {
    const std::uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    return r * std::cos(a);
  }

  std::uint64_t next_u64() {
    if (pos_ == 2) {
      // Counter words: block index, trial (two words), stream tag.
      if (counter_ > 0xFFFFFFFFull) throw SolverError("Philox: stream exhausted");
      const Block out = round10({static_cast<std::uint32_t>(counter_),
                                 static_cast<std::uint32_t>(trial_),
                                 static_cast<std::uint32_t>(trial_ >> 32), tag_},
                                key_);
      buf_ = {static_cast<std::uint64_t>(out[0]) | static_cast<std::uint64_t>(out[1]) << 32,
              static_cast<std::uint64_t>(out[2]) | static_cast<std::uint64_t>(out[3]) << 32};
      ++counter_;
      pos_ = 0;
    }
    return buf_[pos_++];
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t trial_;
  std::uint32_t tag_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int pos_ = 2;
  std::optional<double> spare_;
};

// ---------------------------------------------------------------------------
// Instances.

enum class DesignLaw { Gaussian, Bernoulli, StudentT3 };

inline const char* to_string(DesignLaw d) {
  switch (d) {
    case DesignLaw::Gaussian: return "gaussian";
    case DesignLaw::Bernoulli: return "bernoulli";
    case DesignLaw::StudentT3: return "t3";
  }
  return "?";
}

inline DesignLaw design_from_string(const std::string& s) {
  if (s == "gaussian") return DesignLaw::Gaussian;
  if (s == "bernoulli") return DesignLaw::Bernoulli;
  if (s == "t3") return DesignLaw::StudentT3;
  throw DomainError("unknown design law: " + s);
}

struct Instance {
  Eigen::MatrixXd X;  // n x p
  Eigen::VectorXd theta_star;
  Eigen::VectorXd noise;
  Eigen::VectorXd y;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

enum StreamTag : std::uint32_t { kDesignStream = 1, kSignalStream = 2, kNoiseStream = 3 };

/// Entry of X with variance 1/n under the given law.
inline double design_entry(Philox& rng, DesignLaw law, double inv_sqrt_n) {
  switch (law) {
    case DesignLaw::Gaussian: return rng.normal() * inv_sqrt_n;
    case DesignLaw::Bernoulli: return (rng.uniform() < 0.5 ? -1.0 : 1.0) * inv_sqrt_n;
    case DesignLaw::StudentT3: {
      const double z = rng.normal();
      double chi = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double g = rng.normal();
        chi += g * g;
      }
      // t(3) = z / sqrt(chi^2_3 / 3) has variance 3.
      return z / std::sqrt(chi / 3.0) / std::sqrt(3.0) * inv_sqrt_n;
    }
  }
  return 0.0;
}

/// y = X theta* + noise with theta* drawn i.i.d. from `prior`.
inline Instance gen_instance(int n, int p, const Prior& prior, double sigma, std::uint64_t seed,
                             std::uint64_t trial = 0, DesignLaw law = DesignLaw::Gaussian) {
  if (n < 1 || p < 1) throw DomainError("gen_instance: n and p must be >= 1");
  if (!(sigma >= 0.0)) throw DomainError("gen_instance: sigma must be >= 0");
  Instance inst;
  inst.seed = seed;
  inst.trial = trial;
  inst.X.resize(n, p);
  Philox xr(seed, trial, kDesignStream);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) inst.X(i, j) = design_entry(xr, law, s);

  Philox tr(seed, trial, kSignalStream);
  inst.theta_star.resize(p);
  const auto& atoms = prior.atoms();
  for (int j = 0; j < p; ++j) {
    const double u = tr.uniform();
    double acc = 0.0;
    double v = atoms.back().value;
    for (const auto& a : atoms) {
      acc += a.prob;
      if (u < acc) {
        v = a.value;
        break;
      }
    }
    inst.theta_star(j) = v;
  }
  Philox zr(seed, trial, kNoiseStream);
  inst.noise.resize(n);
  for (int i = 0; i < n; ++i) inst.noise(i) = sigma * zr.normal();
  inst.y = inst.X * inst.theta_star + inst.noise;
  return inst;
}

/// Sparse-model instance at delta = n / p.
inline Instance gen_instance(int n, int p, const SweepSpec& spec, std::uint64_t seed,
                             std::uint64_t trial = 0, DesignLaw law = DesignLaw::Gaussian) {
  const double delta = static_cast<double>(n) / p;
  return gen_instance(n, p, sparse_prior(spec.epsilon, spec.M(), delta), spec.sigma, seed, trial,
                      law);
}

/// (1/n) ||theta_hat - theta*||^2 + sigma^2.
inline double risk_of(const Eigen::Ref<const Eigen::VectorXd>& theta_hat,
                      const Eigen::Ref<const Eigen::VectorXd>& theta_star, double sigma, int n) {
  if (theta_hat.size() != theta_star.size()) throw DomainError("risk_of: size mismatch");
  return (theta_hat - theta_star).squaredNorm() / n + sigma * sigma;
}

// ---------------------------------------------------------------------------
// Basis pursuit: min ||theta||_1 subject to X theta = y.

struct BasisPursuitOptions {
  double tol = 1e-8;  // residuals <= tol * sqrt(p)
  int max_iter = 200000;
  double rho = 1.0;
  int polish_every = 25;
};

struct BasisPursuitResult {
  Eigen::VectorXd theta;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool certified = false;  // KKT certificate verified on the support
};

namespace detail {

// If the support S of z admits theta_S with X_S theta_S = y, matching signs,
// and a dual vector nu with X_S^T nu = sign(theta_S), ||X^T nu||_inf <= 1,
// theta is an exact minimizer.
inline std::optional<Eigen::VectorXd> certify_support(const Eigen::MatrixXd& X,
                                                      const Eigen::VectorXd& y,
                                                      const Eigen::VectorXd& z) {
  const double scale = z.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return std::nullopt;
  std::vector<Eigen::Index> S;
  for (Eigen::Index j = 0; j < z.size(); ++j)
    if (std::abs(z(j)) > 1e-9 * scale) S.push_back(j);
  if (S.empty() || static_cast<Eigen::Index>(S.size()) > X.rows()) return std::nullopt;
  Eigen::MatrixXd XS(X.rows(), static_cast<Eigen::Index>(S.size()));
  for (std::size_t k = 0; k < S.size(); ++k) XS.col(k) = X.col(S[k]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(XS);
  if (qr.rank() < static_cast<Eigen::Index>(S.size())) return std::nullopt;
  const Eigen::VectorXd tS = qr.solve(y);
  if ((XS * tS - y).norm() > 1e-10 * std::max(1.0, y.norm())) return std::nullopt;
  Eigen::VectorXd sgn(tS.size());
  for (Eigen::Index k = 0; k < tS.size(); ++k) {
    if (tS(k) == 0.0 || (tS(k) > 0) != (z(S[k]) > 0)) return std::nullopt;
    sgn(k) = tS(k) > 0 ? 1.0 : -1.0;
  }
  // Least-norm nu with X_S^T nu = sgn.
  const Eigen::VectorXd nu = XS * (XS.transpose() * XS).ldlt().solve(sgn);
  if ((XS.transpose() * nu - sgn).cwiseAbs().maxCoeff() > 1e-9) return std::nullopt;
  if ((X.transpose() * nu).cwiseAbs().maxCoeff() > 1.0 + 1e-9) return std::nullopt;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(X.cols());
  for (std::size_t k = 0; k < S.size(); ++k) theta(S[k]) = tS(k);
  return theta;
}

}  // namespace detail

/// Minimum l1-norm interpolator.  For p <= n returns the least-squares
/// solution.  Otherwise ADMM on min ||z||_1 s.t. x = z, X x = y, with the
/// affine projection factored once through X X^T; every `polish_every`
/// iterations the current support is tested for an exact KKT certificate.
inline BasisPursuitResult min_l1_interpolator(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                              const BasisPursuitOptions& opt = {}) {
  if (X.rows() != y.size()) throw DomainError("min_l1_interpolator: X rows must match y");
  const Eigen::Index n = X.rows(), p = X.cols();
  BasisPursuitResult res;
  if (p <= n) {
    res.theta = X.colPivHouseholderQr().solve(y);
    res.primal_residual = (X * res.theta - y).norm();
    return res;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(X * X.transpose());
  if (llt.info() != Eigen::Success)
    throw SolverError("min_l1_interpolator: X X^T is numerically singular");
  auto project = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v - X.transpose() * llt.solve(X * v - y);
  };

  double rho = opt.rho;
  Eigen::VectorXd x = project(Eigen::VectorXd::Zero(p));
  Eigen::VectorXd z = x;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
  const double tol = opt.tol * std::sqrt(static_cast<double>(p));
  for (int k = 1; k <= opt.max_iter; ++k) {
    x = project(z - u);
    const Eigen::VectorXd z_old = z;
    const double thr = 1.0 / rho;
    z = (x + u).unaryExpr([thr](double v) { return soft_threshold(v, thr); });
    u += x - z;
    res.primal_residual = (x - z).norm();
    res.dual_residual = rho * (z - z_old).norm();
    res.iterations = k;
    if (res.primal_residual <= tol && res.dual_residual <= tol) {
      res.theta = x;
      if (auto t = detail::certify_support(X, y, z)) {
        res.theta = *t;
        res.certified = true;
      }
      return res;
    }
    if (k % opt.polish_every == 0) {
      if (auto t = detail::certify_support(X, y, z)) {
        res.theta = *t;
        res.certified = true;
        return res;
      }
    }
    // Residual balancing; u is the scaled dual, so it rescales with rho.
    if (res.primal_residual > 10.0 * res.dual_residual) {
      rho *= 2.0;
      u /= 2.0;
    } else if (res.dual_residual > 10.0 * res.primal_residual) {
      rho /= 2.0;
      u *= 2.0;
    }
  }
  throw SolverError("min_l1_interpolator: iteration cap reached (primal " +
                    std::to_string(res.primal_residual) + ", dual " +
                    std::to_string(res.dual_residual) + ")");
}

// ---------------------------------------------------------------------------
// Lasso: (1/2) ||y - X theta||^2 + lambda ||theta||_1.

struct LassoOptions {
  double kkt_tol = 1e-8;
  int max_sweeps = 1000000;
  int path_steps = 30;  // warm-start path from lambda_max down to lambda
};

struct LassoResult {
  Eigen::VectorXd theta;
  int sweeps = 0;
  double kkt_violation = 0.0;
};

inline double lasso_kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& theta, double lambda) {
  const Eigen::VectorXd g = X.transpose() * (y - X * theta);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double v = theta(j) != 0.0 ? std::abs(g(j) - lambda * (theta(j) > 0 ? 1.0 : -1.0))
                                     : std::max(0.0, std::abs(g(j)) - lambda);
    worst = std::max(worst, v);
  }
  return worst;
}

/// Cyclic coordinate descent with active-set passes and a warm-started
/// geometric lambda path.
inline LassoResult lasso_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                            const LassoOptions& opt = {}) {
  if (!(lambda > 0.0)) throw DomainError("lasso_cd: lambda must be positive");
  if (X.rows() != y.size()) throw DomainError("lasso_cd: X rows must match y");
  const Eigen::Index p = X.cols();
  const Eigen::VectorXd col_sq = X.colwise().squaredNorm();
  const double lambda_max = (X.transpose() * y).cwiseAbs().maxCoeff();
  LassoResult res;
  res.theta = Eigen::VectorXd::Zero(p);
  if (lambda >= lambda_max) return res;

  Eigen::VectorXd r = y;
  auto update = [&](Eigen::Index j, double lam) {
    if (col_sq(j) == 0.0) return 0.0;
    const double old = res.theta(j);
    const double rho_j = X.col(j).dot(r) + col_sq(j) * old;
    const double fresh = soft_threshold(rho_j, lam) / col_sq(j);
    if (fresh != old) {
      r.noalias() -= (fresh - old) * X.col(j);
      res.theta(j) = fresh;
    }
    return std::abs(fresh - old) * std::sqrt(col_sq(j));
  };

  const int steps = std::max(1, opt.path_steps);
  for (int s = 1; s <= steps; ++s) {
    const double lam = s == steps ? lambda
                                  : lambda_max * std::pow(lambda / lambda_max,
                                                          static_cast<double>(s) / steps);
    const double tol = s == steps ? opt.kkt_tol : std::max(opt.kkt_tol, 1e-6 * lam);
    for (;;) {
      // Full sweep, then iterate on the active set until it settles.
      for (Eigen::Index j = 0; j < p; ++j) update(j, lam);
      ++res.sweeps;
      std::vector<Eigen::Index> active;
      for (Eigen::Index j = 0; j < p; ++j)
        if (res.theta(j) != 0.0) active.push_back(j);
      for (int inner = 0; inner < 100000; ++inner) {
        double change = 0.0;
        for (Eigen::Index j : active) change = std::max(change, update(j, lam));
        ++res.sweeps;
        if (change < 0.1 * tol) break;
      }
      // Recompute the residual to shed accumulated rounding.
      r = y - X * res.theta;
      res.kkt_violation = lasso_kkt_violation(X, y, res.theta, lam);
      if (res.kkt_violation <= tol) break;
      if (res.sweeps > opt.max_sweeps)
        throw SolverError("lasso_cd: sweep cap reached, KKT violation " +
                          std::to_string(res.kkt_violation));
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Sweeps over p / n.

enum class SimSolver { BasisPursuit, LassoCd };

inline const char* to_string(SimSolver s) {
  return s == SimSolver::BasisPursuit ? "bp-admm" : "lasso-cd";
}

struct SimRecord {
  int n = 0;
  int p = 0;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  double risk = 0.0;
  double zero_risk = 0.0;  // risk of the zero estimator on the same instance
  double support_fraction = 0.0;
  double l1_norm_per_p = 0.0;
  SimSolver solver = SimSolver::BasisPursuit;
  int iters = 0;
  double residual = 0.0;
};

struct SimConfig {
  SweepSpec spec;
  std::vector<double> p_over_n;
  int n = 100;
  int trials = 30;
  std::uint64_t seed = 1;
  SimSolver solver = SimSolver::BasisPursuit;
  double lambda = 1e-3;  // lasso-cd only
  DesignLaw law = DesignLaw::Gaussian;
  int workers = 1;
};

struct SimAggregate {
  double p_over_n = 0.0;
  int n = 0;
  int p = 0;
  int trials = 0;  // successful trials
  int failed = 0;
  double mean_risk = 0.0;
  double stderr_risk = 0.0;
  double theory_risk = 0.0;
  double tau0_sq = 0.0;
  double mean_zero_risk = 0.0;
  double stderr_zero_risk = 0.0;
  double mean_support_frac = 0.0;
  SimSolver solver = SimSolver::BasisPursuit;
};

inline double support_fraction(const Eigen::VectorXd& theta) {
  const double scale = theta.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return 0.0;
  return static_cast<double>((theta.array().abs() > 1e-8 * scale).count()) / theta.size();
}

/// Asymptotic risk at aspect ratio n / p for the sparse model.
inline double theory_risk(const SweepSpec& spec, double delta) {
  if (delta == 1.0) return std::numeric_limits<double>::infinity();
  return interpolator_risk(spec.at(delta));
}

inline SimRecord run_trial(const SimConfig& cfg, int p, std::uint64_t trial) {
  const Instance inst = gen_instance(cfg.n, p, cfg.spec, cfg.seed, trial, cfg.law);
  SimRecord rec;
  rec.n = cfg.n;
  rec.p = p;
  rec.seed = cfg.seed;
  rec.trial = trial;
  rec.solver = cfg.solver;
  Eigen::VectorXd theta;
  if (cfg.solver == SimSolver::BasisPursuit) {
    auto bp = min_l1_interpolator(inst.X, inst.y);
    theta = std::move(bp.theta);
    rec.iters = bp.iterations;
    if (p > cfg.n) {
      rec.residual = (inst.X * theta - inst.y).norm() / inst.y.norm();
      if (!(rec.residual <= 1e-6))
        throw SolverError("run_trial: interpolator infeasible, residual " +
                          std::to_string(rec.residual));
    } else {
      // Least squares: the normal equations hold instead of y = X theta.
      rec.residual = (inst.X.transpose() * (inst.X * theta - inst.y)).norm() /
                     (inst.X.transpose() * inst.y).norm();
    }
  } else {
    auto ls = lasso_cd(inst.X, inst.y, cfg.lambda);
    theta = std::move(ls.theta);
    rec.iters = ls.sweeps;
    rec.residual = ls.kkt_violation;
  }
  rec.risk = risk_of(theta, inst.theta_star, cfg.spec.sigma, cfg.n);
  rec.zero_risk = risk_of(Eigen::VectorXd::Zero(p), inst.theta_star, cfg.spec.sigma, cfg.n);
  rec.support_fraction = support_fraction(theta);
  rec.l1_norm_per_p = theta.lpNorm<1>() / p;
  return rec;
}

struct SimResult {
  std::vector<SimRecord> records;  // grid-major, trial-minor; failed trials omitted
  std::vector<SimAggregate> aggregates;
  std::vector<std::string> failures;
};

/// Runs cfg.trials instances per grid point.  Trial keys are
/// grid_index * 2^32 + trial so draws never depend on scheduling.
inline SimResult figure_sweep(const SimConfig& cfg) {
  if (cfg.n < 1 || cfg.trials < 1) throw DomainError("figure_sweep: n and trials must be >= 1");
  const std::size_t G = cfg.p_over_n.size();
  const std::size_t T = static_cast<std::size_t>(cfg.trials);
  std::vector<int> ps(G);
  for (std::size_t g = 0; g < G; ++g) {
    if (!(cfg.p_over_n[g] > 0.0)) throw DomainError("figure_sweep: p/n must be positive");
    ps[g] = std::max(1, static_cast<int>(std::lround(cfg.p_over_n[g] * cfg.n)));
  }
  std::vector<std::optional<SimRecord>> slots(G * T);
  std::vector<std::string> errors(G * T);
  parallel_for(G * T, cfg.workers, [&](std::size_t i) {
    const std::size_t g = i / T, t = i % T;
    try {
      slots[i] = run_trial(cfg, ps[g], (static_cast<std::uint64_t>(g) << 32) | t);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  SimResult out;
  for (std::size_t g = 0; g < G; ++g) {
    SimAggregate a;
    a.p_over_n = cfg.p_over_n[g];
    a.n = cfg.n;
    a.p = ps[g];
    a.solver = cfg.solver;
    const double delta = static_cast<double>(cfg.n) / ps[g];
    std::vector<double> risks, zeros;
    double supp = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const auto& slot = slots[g * T + t];
      if (!slot) {
        ++a.failed;
        out.failures.push_back("p=" + std::to_string(ps[g]) + " trial " + std::to_string(t) +
                               ": " + errors[g * T + t]);
        continue;
      }
      out.records.push_back(*slot);
      risks.push_back(slot->risk);
      zeros.push_back(slot->zero_risk);
      supp += slot->support_fraction;
    }
    a.trials = static_cast<int>(risks.size());
    auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
      mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      se = v.size() > 1 ? std::sqrt(ss / (v.size() - 1) / v.size()) : 0.0;
    };
    if (a.trials > 0) {
      mean_se(risks, a.mean_risk, a.stderr_risk);
      mean_se(zeros, a.mean_zero_risk, a.stderr_zero_risk);
      a.mean_support_frac = supp / a.trials;
    }
    try {
      a.theory_risk = theory_risk(cfg.spec, delta);
    } catch (const std::exception&) {
      a.theory_risk = std::numeric_limits<double>::quiet_NaN();
    }
    a.tau0_sq = cfg.spec.sigma * cfg.spec.sigma + cfg.spec.snr * cfg.spec.sigma * cfg.spec.sigma;
    out.aggregates.push_back(a);
  }
  return out;
}

inline void write_aggregate_csv(std::ostream& os, const std::vector<SimAggregate>& rows) {
  os << "p_over_n,n,p,trials,mean_risk,stderr_risk,theory_risk,mean_support_frac,solver\n";
  os << std::setprecision(17);
  for (const auto& a : rows)
    os << a.p_over_n << ',' << a.n << ',' << a.p << ',' << a.trials << ',' << a.mean_risk << ','
       << a.stderr_risk << ',' << a.theory_risk << ',' << a.mean_support_frac << ','
       << to_string(a.solver) << '\n';
}

}  // namespace l1risk
