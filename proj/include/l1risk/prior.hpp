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

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "l1risk/error.hpp"

namespace l1risk {

struct Atom {
  double value = 0.0;
  double prob = 0.0;
};

/// Parameters of the two-atom sparse model: a fraction epsilon of coordinates
/// equal to M sqrt(delta), the rest zero.
struct SparseSpec {
  double epsilon = 0.0;
  double M = 0.0;
};

/// Finite-atom signal distribution.
class Prior {
 public:
  Prior() = default;

  explicit Prior(std::vector<Atom> atoms, std::string label = {})
      : atoms_(std::move(atoms)), label_(std::move(label)) {
    validate();
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::string& label() const { return label_; }

  /// Set when the prior came from sparse_prior(); enables the (nu, alpha)
  /// parameterization of the fixed-point system.
  const std::optional<SparseSpec>& sparse() const { return sparse_; }

  double prob_nonzero() const {
    double s = 0.0;
    for (const auto& a : atoms_)
      if (a.value != 0.0) s += a.prob;
    return s;
  }

  double max_abs_value() const {
    double m = 0.0;
    for (const auto& a : atoms_) m = std::max(m, std::abs(a.value));
    return m;
  }

  template <typename F>
  double expect(F&& f) const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.prob * f(a.value);
    return s;
  }

  friend Prior sparse_prior(double epsilon, double M, double delta);

 private:
  void validate() const {
    if (atoms_.empty()) throw DomainError("Prior: at least one atom required");
    double total = 0.0;
    for (const auto& a : atoms_) {
      if (!std::isfinite(a.value)) throw DomainError("Prior: non-finite atom");
      if (!(a.prob >= 0.0)) throw DomainError("Prior: negative probability");
      total += a.prob;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw DomainError("Prior: probabilities must sum to 1");
  }

  std::vector<Atom> atoms_;
  std::string label_;
  std::optional<SparseSpec> sparse_;
};

/// epsilon P_{M sqrt(delta)} + (1 - epsilon) P_0.
inline Prior sparse_prior(double epsilon, double M, double delta) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw DomainError("sparse_prior: epsilon must lie in (0, 1]");
  if (!(M > 0.0)) throw DomainError("sparse_prior: M must be positive");
  if (!(delta > 0.0)) throw DomainError("sparse_prior: delta must be positive");
  Prior p({{M * std::sqrt(delta), epsilon}, {0.0, 1.0 - epsilon}}, "sparse");
  p.sparse_ = SparseSpec{epsilon, M};
  return p;
}

/// M such that epsilon M^2 / sigma^2 equals the given SNR.
inline double magnitude_from_snr(double snr, double epsilon, double sigma) {
  if (!(snr > 0.0) || !(epsilon > 0.0) || !(sigma > 0.0))
    throw DomainError("magnitude_from_snr: arguments must be positive");
  return std::sqrt(snr / epsilon) * sigma;
}

inline double second_moment(const Prior& prior) {
  return prior.expect([](double v) { return v * v; });
}

template <typename F>
double expect_over_theta(const Prior& prior, F&& f) {
  return prior.expect(std::forward<F>(f));
}

/// One asymptotic problem instance.
struct ModelParams {
  double delta = 0.5;  // n / p
  double sigma = 1.0;
  Prior prior;

  void validate() const {
    if (!(delta > 0.0)) throw DomainError("ModelParams: delta must be positive");
    if (!(sigma > 0.0)) throw DomainError("ModelParams: sigma must be positive");
  }
};

/// Convenience: sparse model at ratio delta with epsilon M^2 / sigma^2 = snr.
inline ModelParams sparse_model(double delta, double epsilon, double snr,
                                double sigma = 1.0) {
  ModelParams mp;
  mp.delta = delta;
  mp.sigma = sigma;
  mp.prior = sparse_prior(epsilon, magnitude_from_snr(snr, epsilon, sigma), delta);
  return mp;
}

// {"atoms": [[value, prob], ...]}
inline nlohmann::json to_json(const Prior& prior) {
  nlohmann::json j;
  j["atoms"] = nlohmann::json::array();
  for (const auto& a : prior.atoms()) j["atoms"].push_back({a.value, a.prob});
  if (!prior.label().empty()) j["label"] = prior.label();
  return j;
}

inline Prior prior_from_json(const nlohmann::json& j) {
  if (!j.contains("atoms") || !j["atoms"].is_array())
    throw DomainError("prior JSON: missing \"atoms\" array");
  std::vector<Atom> atoms;
  for (const auto& row : j["atoms"]) {
    if (!row.is_array() || row.size() != 2)
      throw DomainError("prior JSON: each atom must be [value, prob]");
    atoms.push_back({row[0].get<double>(), row[1].get<double>()});
  }
  return Prior(std::move(atoms), j.value("label", std::string{}));
}

}  // namespace l1risk
