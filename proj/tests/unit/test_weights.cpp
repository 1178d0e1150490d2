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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "gardm/error.hpp"
#include "gardm/rng.hpp"
#include "gardm/weights.hpp"

using namespace gardm;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("clamp_logit bounds the logit and rejects NaN") {
  CHECK(clamp_logit(100.0) == kLogitClamp);
  CHECK(clamp_logit(-kInf) == -kLogitClamp);
  CHECK(clamp_logit(1.5) == 1.5);
  CHECK_THROWS(clamp_logit(std::nan("")));
}

TEST_CASE("log_sum_exp is stable and handles -inf") {
  const std::vector<double> big{1000.0, 1000.0};
  CHECK(log_sum_exp(big) == doctest::Approx(1000.0 + std::log(2.0)));
  const std::vector<double> mixed{-kInf, std::log(0.25), std::log(0.75)};
  CHECK(log_sum_exp(mixed) == doctest::Approx(0.0));
  const std::vector<double> none{-kInf, -kInf};
  CHECK(log_sum_exp(none) == -kInf);
  CHECK(log_sum_exp(std::vector<double>{}) == -kInf);
}

TEST_CASE("normalize_weights") {
  const std::vector<double> lw{-1000.0, -1000.0 + std::log(3.0), -kInf};
  const auto w = normalize_weights(lw);
  CHECK(w[0] == doctest::Approx(0.25));
  CHECK(w[1] == doctest::Approx(0.75));
  CHECK(w[2] == 0.0);
  try {
    normalize_weights(std::vector<double>{-kInf, -kInf});
    FAIL("expected a degenerate-particles error");
  } catch (const GuidanceError& e) {
    CHECK(e.kind() == GuidanceErrorKind::kDegenerateParticles);
  }
  CHECK_THROWS(normalize_weights(std::vector<double>{0.0, std::nan("")}));
}

TEST_CASE("effective sample size bounds") {
  CHECK(effective_sample_size(std::vector<double>{0.25, 0.25, 0.25, 0.25}) == doctest::Approx(4));
  CHECK(effective_sample_size(std::vector<double>{1.0, 0.0, 0.0}) == doctest::Approx(1));
  CHECK_THROWS_AS(effective_sample_size(std::vector<double>{0.5, 0.4}), ContractViolation);
}

TEST_CASE("systematic resampling count bounds on random weights") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(40);
    std::vector<double> w(n);
    double z = 0.0;
    for (double& v : w) {
      v = rng.uniform01() < 0.2 ? 0.0 : -std::log(1.0 - rng.uniform01());
      z += v;
    }
    if (z == 0.0) w[0] = z = 1.0;
    for (double& v : w) v /= z;
    const auto anc = systematic_resample(w, rng.uniform01());
    REQUIRE(anc.size() == n);
    CHECK(std::is_sorted(anc.begin(), anc.end()));
    std::vector<double> counts(n, 0.0);
    for (std::size_t a : anc) {
      REQUIRE(a < n);
      counts[a] += 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(counts[i] - static_cast<double>(n) * w[i]) < 1.0);
      if (w[i] == 0.0) CHECK(counts[i] == 0.0);
    }
  }
}

TEST_CASE("systematic resampling with a trailing zero weight") {
  const std::vector<double> w{0.5, 0.5, 0.0};
  for (double u : {0.0, 0.3, 0.999999}) {
    const auto anc = systematic_resample(w, u);
    CHECK(std::count(anc.begin(), anc.end(), 2u) == 0);
  }
}

TEST_CASE("worked weight examples") {
  const auto flat = normalize_weights(std::vector<double>{0.0, 0.0, 0.0, 0.0});
  for (double w : flat) CHECK(w == doctest::Approx(0.25));
  const auto two = normalize_weights(std::vector<double>{std::log(2.0), 0.0});
  CHECK(two[0] == doctest::Approx(2.0 / 3));
  CHECK(two[1] == doctest::Approx(1.0 / 3));
  SplitMix64 rng(91);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> lw(7);
    for (double& v : lw) v = 40.0 * rng.uniform01() - 20.0;
    const auto w = normalize_weights(lw);
    double z = 0.0;
    for (double v : lw) z += std::exp(v);
    for (std::size_t i = 0; i < lw.size(); ++i) CHECK(std::abs(w[i] - std::exp(lw[i]) / z) < 1e-12);
  }
  CHECK(effective_sample_size(std::vector<double>{0.5, 0.5, 0.0, 0.0}) == doctest::Approx(2.0));
  CHECK(systematic_resample(std::vector<double>{0.25, 0.25, 0.25, 0.25}, 0.5) ==
        std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(systematic_resample(std::vector<double>{1.0, 0.0, 0.0}, 0.3) ==
        std::vector<std::size_t>{0, 0, 0});
}

TEST_CASE("systematic resampling is unbiased over a grid of offsets") {
  const std::vector<double> w{0.5, 0.3, 0.2};
  constexpr int kGrid = 10000;
  std::vector<double> counts(3, 0.0);
  for (int g = 0; g < kGrid; ++g) {
    for (std::size_t a : systematic_resample(w, (g + 0.5) / kGrid)) counts[a] += 1.0;
  }
  for (std::size_t i = 0; i < 3; ++i) CHECK(counts[i] / kGrid == doctest::Approx(3.0 * w[i]).epsilon(1e-6));
}
