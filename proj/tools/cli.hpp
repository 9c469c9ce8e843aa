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


// Command-line front end: argument parsing, dispatch and output formatting.
// Exit codes: 0 success, 1 numerical or I/O failure, 2 usage error.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "l1risk/l1risk.hpp"

namespace l1risk::cli {

enum ExitCode : int { kOk = 0, kNumerical = 1, kUsage = 2 };

/// Rejected configuration; the message names the offending flag.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out;
  std::string svg;
  std::string format = "csv";
  double tol = 1e-12;
};

struct ModelFlags {
  double epsilon = 0.0;
  std::optional<double> snr;
  std::optional<double> M;
  double sigma = 1.0;

  /// SNR takes precedence; otherwise SNR = epsilon M^2 / sigma^2.
  SweepSpec spec() const {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw UsageError("--eps must lie in (0, 1]");
    if (!(sigma > 0.0)) throw UsageError("--sigma must be positive");
    double s = 0.0;
    if (snr) s = *snr;
    else if (M) s = epsilon * (*M) * (*M) / (sigma * sigma);
    else throw UsageError("one of --snr or --M is required");
    if (!(s > 0.0)) throw UsageError(snr ? "--snr must be positive" : "--M must be nonzero");
    return SweepSpec{epsilon, s, sigma};
  }
};

struct Grid {
  double lo = 0.0, hi = 0.0;
  int count = 0;
};

inline Grid parse_grid(const std::string& text, const std::string& flag) {
  Grid g;
  std::istringstream is(text);
  char c1 = 0, c2 = 0;
  if (!(is >> g.lo >> c1 >> g.hi >> c2 >> g.count) || c1 != ':' || c2 != ':' || !is.eof())
    throw UsageError(flag + " expects lo:hi:count");
  if (!(g.lo > 0.0 && g.hi > g.lo && g.count >= 2))
    throw UsageError(flag + " needs 0 < lo < hi and count >= 2");
  return g;
}

/// Log-spaced values over [lo, hi], increasing.
inline std::vector<double> log_space(const Grid& g) {
  std::vector<double> v(g.count);
  for (int i = 0; i < g.count; ++i)
    v[i] = std::exp(std::log(g.lo) + (std::log(g.hi) - std::log(g.lo)) * i / (g.count - 1));
  return v;
}

/// Column-ordered table rendered as CSV or as a JSON array of records.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  void write(std::ostream& os, const std::string& format) const {
    if (format == "json") {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : rows) {
        nlohmann::json o = nlohmann::json::object();
        for (std::size_t i = 0; i < columns.size(); ++i) o[columns[i]] = r[i];
        arr.push_back(std::move(o));
      }
      os << arr.dump(2) << '\n';
      return;
    }
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n' << std::setprecision(17);
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) os << ',';
        const auto& v = r[i];
        if (v.is_string()) os << v.get<std::string>();
        else if (v.is_null()) os << "";
        else if (v.is_number_float()) os << v.get<double>();
        else os << v.dump();
      }
      os << '\n';
    }
  }
};

inline nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Asymptotic risk of minimum l1-norm interpolators and the Lasso"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", g_.seed, "Master seed")->capture_default_str();
    app.add_option("--workers", g_.workers, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--out", g_.out, "Output file (default: standard output)");
    app.add_option("--svg", g_.svg, "Also write an SVG plot to this path");
    app.add_option("--format", g_.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--tol", g_.tol, "Root-finding tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    std::function<int()> action;
    add_solve(app, action);
    add_lasso(app, action);
    add_sweep(app, action);
    add_amp(app, action);
    add_simulate(app, action);
    add_limits(app, action);

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      out_ << app.help();
      return kOk;
    } catch (const CLI::CallForAllHelp& e) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::ParseError& e) {
      err_ << "error: " << e.what() << '\n';
      return kUsage;
    }
    try {
      return action();
    } catch (const UsageError& e) {
      err_ << "error: " << e.what() << '\n';
      return kUsage;
    } catch (const DomainError& e) {
      err_ << "error: " << e.what() << '\n';
      return kUsage;
    } catch (const std::exception& e) {
      err_ << "failure: " << e.what() << '\n';
      return kNumerical;
    }
  }

 private:
  static void add_model(CLI::App* cmd, ModelFlags& m, bool sigma_required = true) {
    cmd->add_option("--eps", m.epsilon, "Sparsity level epsilon")->required();
    cmd->add_option("--snr", m.snr, "Signal-to-noise ratio epsilon M^2 / sigma^2");
    cmd->add_option("--M", m.M, "Signal magnitude (ignored when --snr is given)");
    auto* s = cmd->add_option("--sigma", m.sigma, "Noise level");
    if (sigma_required) s->required();
    else s->capture_default_str();
  }

  SolverOptions solver() const {
    SolverOptions o;
    o.root_tol = g_.tol;
    return o;
  }

  /// Runs `body` against the chosen output stream.
  template <class F>
  void emit(F&& body) {
    if (g_.out.empty()) {
      body(out_);
      return;
    }
    std::ofstream f(g_.out);
    if (!f) throw std::runtime_error("cannot open " + g_.out);
    body(f);
    if (!f) throw std::runtime_error("write failed: " + g_.out);
  }

  void write_svg(const SvgPlot& plot) const {
    if (g_.svg.empty()) return;
    std::ofstream f(g_.svg);
    if (!f) throw std::runtime_error("cannot open " + g_.svg);
    plot.write(f);
    if (!f) throw std::runtime_error("write failed: " + g_.svg);
  }

  Table solution_table(double delta, double lambda, const SweepSpec& spec) const {
    Table t;
    t.columns = {"delta", "lambda", "alpha", "tau_sq", "nu", "zeta", "residual_f1",
                 "residual_f2", "branch"};
    if (delta > 1.0 && lambda == 0.0) {
      t.rows.push_back({delta, lambda, nullptr, ols_limit(delta, spec.sigma), nullptr, nullptr,
                        0.0, 0.0, "ols"});
      return t;
    }
    const ModelParams mp = spec.at(delta);
    const auto s = lambda == 0.0 ? solve_interpolator(mp, solver())
                                 : solve_lasso(lambda, mp, solver());
    t.rows.push_back({delta, lambda, s.alpha_star, s.risk(),
                      s.nu_star ? nlohmann::json(*s.nu_star) : nlohmann::json(nullptr),
                      s.zeta_star, s.residual_f1, s.residual_f2,
                      lambda == 0.0 ? "interpolator" : "lasso"});
    return t;
  }

  void add_solve(CLI::App& app, std::function<int()>& action) {
    auto* cmd = app.add_subcommand("solve", "Fixed point of the minimum l1-norm interpolator");
    auto m = std::make_shared<ModelFlags>();
    auto delta = std::make_shared<double>();
    cmd->add_option("--delta", *delta, "Aspect ratio n / p")->required();
    add_model(cmd, *m);
    cmd->callback([this, &action, m, delta] {
      action = [this, m, delta] {
        const auto spec = m->spec();
        if (!(*delta > 0.0)) throw UsageError("--delta must be positive");
        if (*delta == 1.0) throw SolverError("risk diverges at --delta 1");
        const Table t = solution_table(*delta, 0.0, spec);
        emit([&](std::ostream& os) { t.write(os, g_.format); });
        return int{kOk};
      };
    });
  }

  void add_lasso(CLI::App& app, std::function<int()>& action) {
    auto* cmd = app.add_subcommand("lasso", "Fixed point of the Lasso at a given lambda");
    auto m = std::make_shared<ModelFlags>();
    auto delta = std::make_shared<double>();
    auto lambda = std::make_shared<double>();
    cmd->add_option("--delta", *delta, "Aspect ratio n / p")->required();
    cmd->add_option("--lambda", *lambda, "Regularization")->required();
    add_model(cmd, *m);
    cmd->callback([this, &action, m, delta, lambda] {
      action = [this, m, delta, lambda] {
        const auto spec = m->spec();
        if (!(*delta > 0.0)) throw UsageError("--delta must be positive");
        if (!(*lambda >= 0.0)) throw UsageError("--lambda must be >= 0");
        if (*delta == 1.0 && *lambda == 0.0) throw SolverError("risk diverges at --delta 1");
        const Table t = solution_table(*delta, *lambda, spec);
        emit([&](std::ostream& os) { t.write(os, g_.format); });
        return int{kOk};
      };
    });
  }

  void add_sweep(CLI::App& app, std::function<int()>& action) {
    auto* cmd = app.add_subcommand("sweep", "Interpolator risk over a grid of p / n");
    auto m = std::make_shared<ModelFlags>();
    auto grid = std::make_shared<std::string>("1.01:100:400");
    cmd->add_option("--grid-log", *grid, "p / n grid lo:hi:count, log-spaced, lo > 1")
        ->capture_default_str();
    add_model(cmd, *m);
    cmd->callback([this, &action, m, grid] {
      action = [this, m, grid] {
        const auto spec = m->spec();
        const Grid g = parse_grid(*grid, "--grid-log");
        if (!(g.lo > 1.0)) throw UsageError("--grid-log must stay above p / n = 1");
        const auto curve = sweep(spec, delta_grid_from_ratio(g.lo, g.hi, g.count), g_.workers,
                                 solver());
        for (const auto& f : curve.failures)
          err_ << "warning: delta " << f.delta << ": " << f.message << '\n';
        emit([&](std::ostream& os) {
          if (g_.format != "json") return write_csv(os, curve);
          Table t;
          t.columns = {"delta", "inv_delta", "tau_sq", "alpha", "nu", "nu_prime", "regime"};
          for (const auto& p : curve.points)
            t.rows.push_back({p.delta, p.inv_delta, p.tau_sq, p.alpha, p.nu,
                              p.nu_prime ? nlohmann::json(*p.nu_prime) : nlohmann::json(nullptr),
                              to_string(p.regime)});
          t.write(os, "json");
        });
        if (!g_.svg.empty()) {
          SvgPlot plot("Interpolator risk, eps = " + fmt(spec.epsilon) +
                           ", SNR = " + fmt(spec.snr),
                       "p / n", "risk");
          add_theory_series(plot, curve, spec);
          write_svg(plot);
        }
        return curve.failures.empty() ? int{kOk} : int{kNumerical};
      };
    });
  }

  void add_amp(CLI::App& app, std::function<int()>& action) {
    auto* cmd = app.add_subcommand("amp", "AMP with a decaying lambda schedule on one instance");
    auto m = std::make_shared<ModelFlags>();
    struct AmpFlags {
      int n = 100, p = 400;
      double mu_scale = 1.0, lambda_scale = 1.0;
      AmpOptions opt;
      bool compare_bp = false;
    };
    auto a = std::make_shared<AmpFlags>();
    cmd->add_option("--n", a->n, "Rows")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--p", a->p, "Columns")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--mu-scale", a->mu_scale, "Scale of the schedule values")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--lambda-scale", a->lambda_scale, "Scale of the cumulative schedule")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--lambda-stop", a->opt.lambda_stop, "Stop once lambda_t is at most this")
        ->capture_default_str();
    cmd->add_option("--increment-stop", a->opt.increment_stop,
                    "and the normalized increment is at most this")
        ->capture_default_str();
    cmd->add_option("--max-iter", a->opt.max_iter, "Iteration cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_flag("--compare-bp", a->compare_bp, "Report the distance to basis pursuit");
    add_model(cmd, *m);
    cmd->callback([this, &action, m, a] {
      action = [this, m, a] {
        const auto spec = m->spec();
        const double delta = static_cast<double>(a->n) / a->p;
        if (!(delta < 1.0)) throw UsageError("--n must be smaller than --p");
        const auto inst = gen_instance(a->n, a->p, spec, g_.seed);
        const LambdaSchedule schedule(a->mu_scale, a->lambda_scale);
        a->opt.solver = solver();
        std::vector<AmpTraceRow> trace;
        int status = kOk;
        std::optional<AmpRun> run;
        try {
          run = run_amp(inst.X, inst.y, spec.at(delta), schedule, a->opt);
          trace = run->trace;
        } catch (const DivergenceError& e) {
          err_ << "failure: " << e.what() << '\n';
          trace = e.trace();
          status = kNumerical;
        }
        emit([&](std::ostream& os) {
          if (g_.format == "json") {
            Table t;
            t.columns = {"t", "lambda", "zeta", "tau_t", "alpha_star_t", "tau_star_t",
                         "increment", "sg_score"};
            for (const auto& r : trace)
              t.rows.push_back({r.t, r.lambda, r.zeta, r.tau_t, r.alpha_star_t, r.tau_star_t,
                                r.increment, r.sg_score});
            t.write(os, "json");
          } else {
            write_trace_csv(os, trace);
          }
        });
        if (run) {
          const double p = a->p;
          err_ << "t " << run->t << "  lambda " << run->lambda << "  risk "
               << risk_of(run->theta, inst.theta_star, spec.sigma, a->n) << "  support "
               << support_fraction(run->theta) << '\n';
          if (a->compare_bp) {
            const auto bp = min_l1_interpolator(inst.X, inst.y);
            const double tau_sq = solve_interpolator(spec.at(delta), solver()).risk();
            err_ << "distance to basis pursuit / tau*^2 "
                 << (run->theta - bp.theta).squaredNorm() / p / tau_sq << '\n';
          }
        }
        if (!g_.svg.empty()) {
          SvgPlot plot("AMP trace", "t", "value", true, true);
          Series lam{"lambda_t", {}, {}, {}, SeriesStyle::Line, "#1f77b4"};
          Series tau{"tau_t", {}, {}, {}, SeriesStyle::Line, "#d62728"};
          Series sg{"subgradient score", {}, {}, {}, SeriesStyle::Dotted, "#2ca02c"};
          for (const auto& r : trace) {
            for (auto* s : {&lam, &tau, &sg}) s->x.push_back(r.t);
            lam.y.push_back(r.lambda);
            tau.y.push_back(r.tau_t);
            sg.y.push_back(r.sg_score);
          }
          plot.add(lam);
          plot.add(tau);
          plot.add(sg);
          write_svg(plot);
        }
        return status;
      };
    });
  }

  void add_simulate(CLI::App& app, std::function<int()>& action) {
    auto* cmd = app.add_subcommand("simulate", "Monte Carlo risk against theory over p / n");
    auto m = std::make_shared<ModelFlags>();
    auto cfg = std::make_shared<SimConfig>();
    auto grid = std::make_shared<std::string>("2:50:4");
    auto solver_name = std::make_shared<std::string>("bp-admm");
    auto design = std::make_shared<std::string>("gaussian");
    cmd->add_option("--n", cfg->n, "Rows")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--trials", cfg->trials, "Trials per grid point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--grid-log", *grid, "p / n grid lo:hi:count, log-spaced")
        ->capture_default_str();
    cmd->add_option("--solver", *solver_name, "Estimator")
        ->check(CLI::IsMember({"bp-admm", "lasso-cd"}))
        ->capture_default_str();
    cmd->add_option("--lambda", cfg->lambda, "Lasso penalty for lasso-cd")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--design", *design, "Design entry law")
        ->check(CLI::IsMember({"gaussian", "bernoulli", "t3"}))
        ->capture_default_str();
    add_model(cmd, *m);
    cmd->callback([this, &action, m, cfg, grid, solver_name, design] {
      action = [this, m, cfg, grid, solver_name, design] {
        cfg->spec = m->spec();
        const Grid g = parse_grid(*grid, "--grid-log");
        cfg->p_over_n = log_space(g);
        cfg->seed = g_.seed;
        cfg->workers = g_.workers;
        cfg->solver = *solver_name == "lasso-cd" ? SimSolver::LassoCd : SimSolver::BasisPursuit;
        cfg->law = design_from_string(*design);
        const auto res = figure_sweep(*cfg);
        for (const auto& f : res.failures) err_ << "warning: " << f << '\n';
        emit([&](std::ostream& os) {
          if (g_.format == "json") {
            Table t;
            t.columns = {"p_over_n", "n", "p", "trials", "mean_risk", "stderr_risk",
                         "theory_risk", "mean_support_frac", "solver"};
            for (const auto& a : res.aggregates)
              t.rows.push_back({a.p_over_n, a.n, a.p, a.trials, number_or_null(a.mean_risk),
                                number_or_null(a.stderr_risk), number_or_null(a.theory_risk),
                                a.mean_support_frac, to_string(a.solver)});
            t.write(os, "json");
          } else {
            write_aggregate_csv(os, res.aggregates);
          }
        });
        if (!g_.svg.empty()) {
          SvgPlot plot("Monte Carlo risk, n = " + std::to_string(cfg->n) + ", eps = " +
                           fmt(cfg->spec.epsilon) + ", SNR = " + fmt(cfg->spec.snr),
                       "p / n", "risk");
          // Theory on a dense grid, split at p = n where it diverges.
          Series below{"theory", {}, {}, {}, SeriesStyle::Line, "#1f77b4"};
          Series above{"theory", {}, {}, {}, SeriesStyle::Line, "#1f77b4"};
          for (double r : log_space(Grid{g.lo, g.hi, 300})) {
            if (std::abs(r - 1.0) < 1e-2) continue;
            double v = std::numeric_limits<double>::quiet_NaN();
            try {
              v = theory_risk(cfg->spec, 1.0 / r);
            } catch (const std::exception&) {
            }
            auto& s = r < 1.0 ? below : above;
            s.x.push_back(r);
            s.y.push_back(v);
          }
          if (!below.x.empty()) plot.add(below);
          if (!above.x.empty()) plot.add(above);
          add_reference_series(plot, cfg->spec, g.lo, g.hi);
          Series mc{"Monte Carlo", {}, {}, {}, SeriesStyle::Points, "#d62728"};
          for (const auto& a : res.aggregates) {
            mc.x.push_back(a.p_over_n);
            mc.y.push_back(a.mean_risk);
            mc.err.push_back(a.stderr_risk);
          }
          plot.add(mc);
          write_svg(plot);
        }
        return res.failures.empty() ? int{kOk} : int{kNumerical};
      };
    });
  }

  void add_limits(CLI::App& app, std::function<int()>& action) {
    auto* cmd = app.add_subcommand("limits", "Closed-form limits at one aspect ratio");
    auto delta = std::make_shared<double>();
    auto sigma = std::make_shared<double>(1.0);
    auto snr = std::make_shared<double>(1.0);
    cmd->add_option("--delta", *delta, "Aspect ratio n / p in (0, 1)")->required();
    cmd->add_option("--sigma", *sigma, "Noise level")->capture_default_str();
    cmd->add_option("--snr", *snr, "Signal-to-noise ratio for tau0^2")->capture_default_str();
    cmd->callback([this, &action, delta, sigma, snr] {
      action = [this, delta, sigma, snr] {
        if (!(*delta > 0.0 && *delta < 1.0)) throw UsageError("--delta must lie in (0, 1)");
        if (!(*sigma > 0.0)) throw UsageError("--sigma must be positive");
        if (!(*snr >= 0.0)) throw UsageError("--snr must be >= 0");
        const auto lim = eps_to_zero_limits(*delta);
        Table t;
        t.columns = {"delta", "H", "tau0_sq", "alpha0", "nu_over_M"};
        t.rows.push_back({*delta, H_fn(*delta), *sigma * *sigma * (1.0 + *snr), lim.alpha0,
                          lim.nu_over_M});
        emit([&](std::ostream& os) { t.write(os, g_.format); });
        return int{kOk};
      };
    });
  }

  static std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }

  static void add_reference_series(SvgPlot& plot, const SweepSpec& spec, double lo, double hi) {
    Series t0{"tau0^2 (zero estimator)", {lo, hi}, {}, {}, SeriesStyle::Dotted, "#7f7f7f"};
    const double v = spec.sigma * spec.sigma * (1.0 + spec.snr);
    t0.y = {v, v};
    plot.add(t0);
    Series l2{"min l2-norm interpolator", {}, {}, {}, SeriesStyle::Dotted, "#2ca02c"};
    for (double r : log_space(Grid{lo, hi, 300})) {
      if (std::abs(r - 1.0) < 1e-2) continue;
      l2.x.push_back(r);
      l2.y.push_back(l2_interpolator_risk(1.0 / r, spec.epsilon, spec.M(), spec.sigma));
    }
    plot.add(l2);
  }

  static void add_theory_series(SvgPlot& plot, const RiskCurve& curve, const SweepSpec& spec) {
    Series s{"min l1-norm interpolator", {}, {}, {}, SeriesStyle::Line, "#1f77b4"};
    for (auto it = curve.points.rbegin(); it != curve.points.rend(); ++it) {
      s.x.push_back(it->inv_delta);
      s.y.push_back(it->tau_sq);
    }
    plot.add(s);
    if (!s.x.empty()) add_reference_series(plot, spec, s.x.front(), s.x.back());
  }

  std::ostream& out_;
  std::ostream& err_;
  GlobalOptions g_;
};

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  return Runner(out, err).run(argc, argv);
}

}  // namespace l1risk::cli
