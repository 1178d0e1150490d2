// Copyright 2026 The guided-ardm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ==============================================================================

#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "gardm/discriminator.hpp"
#include "gardm/error.hpp"
#include "oracles.hpp"

using namespace gardm;

namespace {

MaskedSample partial_from(const DomainPtr& d, const std::vector<int>& values) {
  MaskedSample s(d);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] >= 0) s.assign(k, values[k]);
  }
  return s;
}

double log_sigmoid_ref(double l) { return -std::log1p(std::exp(-l)); }

double binom(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Population version of the loss: t ~ U{1..D}, sigma uniform, so a mask
// with t assigned positions has probability 1 / (D * C(D, t)).
double exact_loss(const Discriminator& disc, const std::vector<double>& pd,
                  const std::vector<double>& pt, const std::vector<int>& cats) {
  const DomainPtr d = make_domain(cats);
  const std::size_t dim = cats.size();
  double total = 0.0;
  for (const auto& partial : oracle::all_partials(cats)) {
    std::size_t t = 0;
    for (int v : partial) t += v >= 0 ? 1 : 0;
    if (t == 0) continue;
    const double mask_p = 1.0 / (static_cast<double>(dim) * binom(dim, t));
    const double l = disc.logit(partial_from(d, partial));
    total += mask_p * (oracle::marginal(pd, cats, partial) * log_sigmoid_ref(l) +
                       oracle::marginal(pt, cats, partial) * log_sigmoid_ref(-l));
  }
  return total;
}

}  // namespace

TEST_CASE("optimal logit is the log density ratio of the prefix marginals") {
  SplitMix64 rng(31);
  const std::vector<int> cats{2, 3, 2};
  const DomainPtr d = make_domain(cats);
  const auto pd = oracle::random_table(d->state_count(), rng);
  const auto pt = oracle::random_table(d->state_count(), rng);
  const auto disc = optimal_discriminator(std::make_shared<const TabularJoint>(d, pd),
                                          std::make_shared<const TabularJoint>(d, pt));
  for (const auto& partial : oracle::all_partials(cats)) {
    const double want = std::log(oracle::marginal(pd, cats, partial)) -
                        std::log(oracle::marginal(pt, cats, partial));
    CHECK(std::abs(disc->logit(partial_from(d, partial)) - want) < 1e-12);
  }
  CHECK(disc->logit(MaskedSample(d)) == 0.0);
}

TEST_CASE("optimal discriminator support handling") {
  const DomainPtr d = make_domain({2});
  auto data = std::make_shared<const TabularJoint>(d, std::vector<double>{0.0, 1.0});
  auto model = std::make_shared<const TabularJoint>(d, std::vector<double>{1.0, 0.0});
  const OptimalDiscriminator disc(data, model);
  CHECK(disc.logit(MaskedSample(d, {0})) == -std::numeric_limits<double>::infinity());
  try {
    disc.logit(MaskedSample(d, {1}));
    FAIL("expected support violation");
  } catch (const GuidanceError& e) {
    CHECK(e.kind() == GuidanceErrorKind::kSupportViolation);
  }
  const DomainPtr d2 = make_domain({2, 2});
  auto both = std::make_shared<const TabularJoint>(d2, std::vector<double>{0.5, 0.5, 0.0, 0.0});
  const OptimalDiscriminator same(both, both);
  try {
    same.logit(MaskedSample(d2, {1, 0}));
    FAIL("expected unreachable prefix");
  } catch (const GuidanceError& e) {
    CHECK(e.kind() == GuidanceErrorKind::kUnreachablePrefix);
  }
  CHECK_THROWS_AS(OptimalDiscriminator(both, model), ContractViolation);
}

TEST_CASE("attenuation schedules") {
  CHECK(attenuation(AttenuationSchedule::kFinalStepExact, 2, 3) == 1.0);
  CHECK(attenuation(AttenuationSchedule::kFinalStepExact, 3, 3) == 0.0);
  CHECK(attenuation(AttenuationSchedule::kAllSteps, 3, 3) == 1.0);
  CHECK(attenuation(AttenuationSchedule::kLinear, 1, 4) == doctest::Approx(0.75));
  CHECK(attenuation(AttenuationSchedule::kLinear, 4, 4) == 0.0);
}

TEST_CASE("corrupted discriminator scales the base logit") {
  const DomainPtr d = make_domain({2, 2});
  auto base = std::make_shared<const ConstantDiscriminator>(2.0);
  const auto final_exact = corrupt(base, 1.0);
  MaskedSample one(d);
  one.assign(0, 1);
  CHECK(final_exact->logit(one) == 0.0);
  CHECK(final_exact->logit(MaskedSample(d, {1, 0})) == 2.0);
  const auto half = corrupt(base, 0.5, AttenuationSchedule::kAllSteps);
  CHECK(half->logit(one) == doctest::Approx(1.0));
  CHECK(half->logit(MaskedSample(d, {1, 0})) == doctest::Approx(1.0));
  CHECK(corrupt(base, 0.0, AttenuationSchedule::kAllSteps)->logit(one) == 2.0);
  CHECK_THROWS_AS(corrupt(base, 1.5), ContractViolation);
  CHECK(ConstantDiscriminator(3.0).logit(MaskedSample(d)) == 0.0);
  CHECK(ConstantDiscriminator(3.0).logit(one) == 3.0);
}

TEST_CASE("discriminator probability and loss formula") {
  CHECK(discriminator_probability(0.0) == doctest::Approx(0.5));
  CHECK(discriminator_probability(std::log(3.0)) == doctest::Approx(0.75));
  const DomainPtr d = make_domain({2});
  const ConstantDiscriminator disc(std::log(3.0));
  const std::vector<MaskedSample> real{MaskedSample(d, {0})};
  const std::vector<MaskedSample> fake{MaskedSample(d, {1}), MaskedSample(d, {0})};
  CHECK(discriminator_loss(disc, real, fake) == doctest::Approx(std::log(0.75) + std::log(0.25)));
  CHECK_THROWS_AS(discriminator_loss(disc, {}, fake), ContractViolation);
}

TEST_CASE("optimal discriminator maximizes the population objective") {
  SplitMix64 rng(77);
  const std::vector<int> cats{2, 2, 3};
  const DomainPtr d = make_domain(cats);
  const auto pd = oracle::random_table(d->state_count(), rng);
  const auto pt = oracle::random_table(d->state_count(), rng);
  auto opt = optimal_discriminator(std::make_shared<const TabularJoint>(d, pd),
                                   std::make_shared<const TabularJoint>(d, pt));
  const double best = exact_loss(*opt, pd, pt, cats);
  CHECK(best >= exact_loss(ConstantDiscriminator(0.0), pd, pt, cats));
  CHECK(best >= exact_loss(ConstantDiscriminator(0.3), pd, pt, cats));
  CHECK(best >= exact_loss(*corrupt(opt, 0.5, AttenuationSchedule::kAllSteps), pd, pt, cats));
  CHECK(best >= exact_loss(*corrupt(opt, 1.0, AttenuationSchedule::kLinear), pd, pt, cats));
}

TEST_CASE("draw_loss_prefixes yields non-empty prefixes of sampled states") {
  SplitMix64 rng(5);
  const DomainPtr d = make_domain({2, 2, 2});
  const TabularJoint j(d, {0.5, 0, 0, 0, 0, 0, 0, 0.5});
  for (const MaskedSample& p : draw_loss_prefixes(j, 200, rng)) {
    CHECK(p.assigned_count() >= 1);
    int seen = -1;
    for (std::size_t k = 0; k < 3; ++k) {
      if (!p.is_assigned(k)) continue;
      if (seen >= 0) CHECK(p.value(k) == seen);
      seen = p.value(k);
    }
  }
}
