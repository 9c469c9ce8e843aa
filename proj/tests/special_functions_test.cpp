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

#include "l1risk/special_functions.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

namespace l1risk {
namespace {

TEST(NormalDensity, ReferenceValues) {
  EXPECT_DOUBLE_EQ(phi(0.0), 0.3989422804014327);
  EXPECT_NEAR(phi(1.0), 0.24197072451914337, 1e-16);
  for (double x : {0.3, 1.7, 5.0, 12.0}) EXPECT_EQ(phi(x), phi(-x));
}

TEST(NormalCdf, ReferenceValues) {
  EXPECT_EQ(Phi(0.0), 0.5);
  EXPECT_NEAR(Phi(-1.0), 0.15865525393145707, 1e-16);
  EXPECT_EQ(Phi_inv(0.5), 0.0);
}

TEST(NormalCdf, MonotoneAndRoundTrips) {
  double prev = 0.0;
  for (double x = -8.0; x <= 8.0; x += 0.01) {
    const double p = Phi(x);
    EXPECT_GE(p, prev);
    prev = p;
    // Above the median p = Phi(x) itself carries an absolute rounding error
    // of half an ulp, which the inverse amplifies by 1/phi(x).
    const double cond = x > 0.0 ? 0.5 * (std::nextafter(p, 2.0) - p) / phi(x) : 0.0;
    EXPECT_NEAR(Phi_inv(p), x, 1e-12 * std::max(1.0, std::abs(x)) + 2.0 * cond) << x;
  }
}

TEST(NormalCdf, InverseRejectsOutOfRange) {
  EXPECT_THROW(Phi_inv(0.0), DomainError);
  EXPECT_THROW(Phi_inv(1.0), DomainError);
  EXPECT_THROW(Phi_inv(-0.2), DomainError);
  EXPECT_THROW(Phi_inv(std::nan("")), DomainError);
}

TEST(NormalCdf, LogTailDoesNotUnderflow) {
  // log Phi(-40) = -800 - log(40 sqrt(2 pi)) - log(1 - 1/1600 + ...)
  const double ref = -800.0 - std::log(40.0) - kLogSqrt2Pi +
                     std::log1p(-1.0 / 1600.0 + 3.0 / (1600.0 * 1600.0));
  EXPECT_NEAR(log_Phi(-40.0), ref, 1e-8);
  EXPECT_NEAR(log_Phi(-3.0), std::log(Phi(-3.0)), 1e-14);
  EXPECT_NEAR(log_Phi(6.0), std::log1p(-Phi(-6.0)), 1e-18);
}

TEST(SoftThreshold, Values) {
  EXPECT_EQ(soft_threshold(3.0, 1.0), 2.0);
  EXPECT_EQ(soft_threshold(-0.5, 1.0), 0.0);
  EXPECT_EQ(soft_threshold(-3.0, 1.0), -2.0);
  for (double x : {-2.5, 0.0, 1e-9, 7.0}) EXPECT_EQ(soft_threshold(x, 0.0), x);
  EXPECT_EQ(soft_threshold_deriv(1.0, 1.0), 0.0);
  EXPECT_EQ(soft_threshold_deriv(1.5, 1.0), 1.0);
  EXPECT_EQ(soft_threshold_deriv(-1.5, 1.0), 1.0);
  EXPECT_THROW(soft_threshold(1.0, -1.0), DomainError);
  EXPECT_THROW(soft_threshold_deriv(1.0, -1.0), DomainError);
}

TEST(SoftThreshold, OneLipschitzInBothArguments) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> x(-5.0, 5.0), z(0.0, 3.0);
  for (int i = 0; i < 2000; ++i) {
    const double x1 = x(rng), x2 = x(rng), z1 = z(rng), z2 = z(rng);
    EXPECT_LE(std::abs(soft_threshold(x1, z1) - soft_threshold(x2, z1)),
              std::abs(x1 - x2) + 1e-15);
    EXPECT_LE(std::abs(soft_threshold(x1, z1) - soft_threshold(x1, z2)),
              std::abs(z1 - z2) + 1e-15);
  }
}

TEST(TruncatedSecondMoment, Limits) {
  EXPECT_NEAR(truncated_second_moment(0.0, 0.0), 0.5, 1e-16);
  EXPECT_NEAR(truncated_second_moment(0.0, -20.0), 1.0, 1e-12);
}

TEST(TruncatedSecondMoment, MatchesAdaptiveQuadrature) {
  auto oracle = [](double a, double b) {
    return integrate_adaptive(
        [a](double z) { return (z - a) * (z - a) * phi(z); }, b,
        std::max(b, 0.0) + 40.0, {}, 1e-14);
  };
  EXPECT_NEAR(truncated_second_moment(1.0, 2.0),
              integrate_adaptive([](double z) { return (z - 1) * (z - 1) * phi(z); },
                                 2.0, 20.0, {}, 1e-14),
              1e-10);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> a(-4.0, 4.0), b(-6.0, 6.0);
  for (int i = 0; i < 100; ++i) {
    const double ai = a(rng), bi = b(rng);
    EXPECT_NEAR(truncated_second_moment(ai, bi), oracle(ai, bi), 1e-10)
        << ai << " " << bi;
  }
}

TEST(StopLoss, Values) {
  EXPECT_DOUBLE_EQ(g_fn(0.0), 0.3989422804014327);
  EXPECT_NEAR(g_fn(1.0), 0.08331547, 1e-8);
  const double r = 100.0 * g_fn(10.0) / phi(10.0);
  EXPECT_GE(r, 0.95);
  EXPECT_LE(r, 1.05);
  for (double x = -10.0; x <= 30.0; x += 0.25) EXPECT_GT(g_fn(x), 0.0) << x;
  // Tail values from a 40-digit reference.
  EXPECT_NEAR(g_fn(5.0) / 5.346165533832815e-08, 1.0, 1e-13);
  EXPECT_NEAR(g_fn(8.0) / 7.550262411946499e-17, 1.0, 1e-13);
  EXPECT_NEAR(g_fn(12.0) / 1.4605201169845548e-34, 1.0, 1e-13);
  EXPECT_NEAR(g_fn(30.0) / 1.631956734091401e-199, 1.0, 1e-13);
}

TEST(MomentLimits, AtTwelve) {
  const double a = 12.0;
  EXPECT_NEAR(a * Phi(-a) / phi(a), 1.0, 0.05);
  EXPECT_NEAR(a * a * g_fn(a) / phi(a), 1.0, 0.05);
  const double t = a * a * a * (a * phi(a) - (a * a + 1.0) * Phi(-a)) / phi(a);
  EXPECT_NEAR(t, -2.0, 0.1);
}

TEST(GaussHermite, RuleInvariants) {
  const auto rule = gauss_hermite_rule();
  ASSERT_EQ(rule.nodes.size(), 61u);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    EXPECT_GT(rule.weights[i], 0.0);
    if (i > 0) {
      EXPECT_LT(rule.nodes[i - 1], rule.nodes[i]);
    }
    s += rule.weights[i];
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(GaussHermite, Moments) {
  const auto rule = gauss_hermite_rule();
  EXPECT_NEAR(gaussian_expectation([](double z) { return z; }, rule), 0.0, 1e-12);
  EXPECT_NEAR(gaussian_expectation([](double z) { return z * z; }, rule), 1.0, 1e-10);
  EXPECT_NEAR(gaussian_expectation([](double z) { return std::pow(z, 4); }, rule),
              3.0, 1e-9);
}

TEST(GaussianExpectation, SoftThresholdSecondMoment) {
  const double closed = 2.0 * (-phi(1.0) + 2.0 * Phi(-1.0));
  auto f = [](double z) { return std::pow(soft_threshold(z, 1.0), 2); };
  EXPECT_NEAR(gaussian_expectation(f, adaptive_rule({-1.0, 1.0})), closed, 1e-12);
  // The kinks cost the fixed rule a few digits.
  EXPECT_NEAR(gaussian_expectation(f, gauss_hermite_rule()), closed, 1e-3);
}

TEST(GaussianExpectation, ReportsNonFiniteValues) {
  auto bad = [](double z) { return z > 0.5 ? std::nan("") : z; };
  EXPECT_THROW(gaussian_expectation(bad, gauss_hermite_rule()), SolverError);
  EXPECT_THROW(gaussian_expectation(bad, adaptive_rule()), SolverError);
}

}  // namespace
}  // namespace l1risk
