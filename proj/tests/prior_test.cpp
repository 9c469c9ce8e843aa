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


#include "l1risk/prior.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace l1risk {
namespace {

TEST(SparsePrior, Atoms) {
  const Prior p = sparse_prior(1.0, 2.0, 0.25);
  ASSERT_EQ(p.atoms().size(), 2u);
  EXPECT_DOUBLE_EQ(p.atoms()[0].value, 1.0);
  EXPECT_DOUBLE_EQ(p.atoms()[0].prob, 1.0);
  EXPECT_DOUBLE_EQ(p.atoms()[1].prob, 0.0);
  ASSERT_TRUE(p.sparse().has_value());
  EXPECT_DOUBLE_EQ(p.sparse()->M, 2.0);
}

TEST(SparsePrior, SecondMoment) {
  EXPECT_DOUBLE_EQ(second_moment(sparse_prior(0.5, 2.0, 1.0)), 2.0);
  // 1 + E[Theta^2] / delta at delta = 1.
  EXPECT_NEAR(1.0 + second_moment(sparse_prior(0.02, 10.0, 1.0)), 3.0, 1e-14);
}

TEST(SparsePrior, SnrFromMagnitude) {
  const Prior p = sparse_prior(0.01, std::sqrt(200.0), 0.5);
  EXPECT_NEAR(p.sparse()->epsilon * p.sparse()->M * p.sparse()->M, 2.0, 1e-12);
  EXPECT_NEAR(magnitude_from_snr(2.0, 0.01, 1.0), std::sqrt(200.0), 1e-12);
  const double m = 3.0;
  const auto a = sparse_prior(0.2, m, 0.7), b = sparse_prior(0.05, 2.0 * m, 0.7);
  EXPECT_DOUBLE_EQ(a.sparse()->epsilon * a.sparse()->M * a.sparse()->M,
                   b.sparse()->epsilon * b.sparse()->M * b.sparse()->M);
}

TEST(SparsePrior, Rejects) {
  EXPECT_THROW(sparse_prior(0.0, 1.0, 0.5), DomainError);
  EXPECT_THROW(sparse_prior(1.5, 1.0, 0.5), DomainError);
  EXPECT_THROW(sparse_prior(0.5, 0.0, 0.5), DomainError);
  EXPECT_THROW(sparse_prior(0.5, 1.0, 0.0), DomainError);
}

TEST(Prior, Expectations) {
  const Prior zero({{0.0, 1.0}});
  EXPECT_EQ(second_moment(zero), 0.0);
  const double eps = 0.3, M = 2.0, delta = 0.4;
  const Prior p = sparse_prior(eps, M, delta);
  EXPECT_NEAR(expect_over_theta(p, [](double v) { return std::abs(v); }),
              eps * M * std::sqrt(delta), 1e-15);
  const Prior q({{-1.5, 0.2}, {0.0, 0.5}, {3.0, 0.3}});
  EXPECT_EQ(expect_over_theta(q, [](double v) { return v * v; }), second_moment(q));
  EXPECT_DOUBLE_EQ(q.prob_nonzero(), 0.5);
  EXPECT_DOUBLE_EQ(q.max_abs_value(), 3.0);
}

TEST(Prior, Validation) {
  EXPECT_THROW(Prior(std::vector<Atom>{}), DomainError);
  EXPECT_THROW(Prior({{1.0, 0.5}}), DomainError);
  EXPECT_THROW(Prior({{1.0, 1.2}, {0.0, -0.2}}), DomainError);
  EXPECT_THROW(Prior({{INFINITY, 1.0}}), DomainError);
}

TEST(Prior, JsonRoundTrip) {
  const Prior q({{-1.5, 0.25}, {2.0, 0.75}}, "two");
  const auto j = to_json(q);
  EXPECT_EQ(j["atoms"].size(), 2u);
  const Prior r = prior_from_json(j);
  ASSERT_EQ(r.atoms().size(), 2u);
  EXPECT_EQ(r.atoms()[0].value, -1.5);
  EXPECT_EQ(r.atoms()[1].prob, 0.75);
  EXPECT_EQ(r.label(), "two");
  EXPECT_THROW(prior_from_json(nlohmann::json::parse(R"({"atoms": [[1]]})")),
               DomainError);
  EXPECT_THROW(prior_from_json(nlohmann::json::object()), DomainError);
}

TEST(ModelParams, SparseModel) {
  const auto mp = sparse_model(0.5, 0.01, 2.0, 1.0);
  EXPECT_NEAR(mp.prior.sparse()->M, std::sqrt(200.0), 1e-12);
  EXPECT_NEAR(mp.prior.atoms()[0].value, std::sqrt(200.0 * 0.5), 1e-12);
  ModelParams bad = mp;
  bad.sigma = 0.0;
  EXPECT_THROW(bad.validate(), DomainError);
}

}  // namespace
}  // namespace l1risk
