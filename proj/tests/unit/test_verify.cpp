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

#include <string>

#include "doctest.h"
#include "gardm/config.hpp"
#include "gardm/verify.hpp"
#include "oracles.hpp"

using namespace gardm;

namespace {

JointPtr joint(std::vector<int> cats, std::vector<double> p) {
  return std::make_shared<const TabularJoint>(make_domain(std::move(cats)), std::move(p));
}

}  // namespace

TEST_CASE("D=3 binary pair passes every check") {
  SplitMix64 rng(1);
  const auto pd = oracle::random_table(8, rng);
  const auto pt = oracle::random_table(8, rng);
  const VerifyReport r = verify_pair(joint({2, 2, 2}, pd), joint({2, 2, 2}, pt), 3);
  CHECK(r.checks.size() == 5);
  CHECK(r.all_passed());
  CHECK(r.render().find("[PASS] n1_reductions") != std::string::npos);
}

TEST_CASE("D=1 pair passes exactness") {
  const VerifyReport r = verify_pair(joint({3}, {0.2, 0.3, 0.5}), joint({3}, {0.6, 0.3, 0.1}), 0);
  CHECK(r.all_passed());
}

TEST_CASE("zero-data states are allowed") {
  const VerifyReport r = verify_pair(joint({2, 2}, {0.5, 0.0, 0.0, 0.5}),
                                     joint({2, 2}, {0.25, 0.25, 0.25, 0.25}), 0);
  CHECK(r.all_passed());
}

TEST_CASE("mismatched support is reported") {
  const VerifyReport r = verify_pair(joint({2, 2}, {0.25, 0.25, 0.25, 0.25}),
                                     joint({2, 2}, {0.5, 0.5, 0.0, 0.0}), 0);
  CHECK_FALSE(r.all_passed());
  CHECK(r.render().find("support violation") != std::string::npos);
}

TEST_CASE("oracle cap refuses large domains with the state count") {
  CHECK(partial_state_count(Domain({2, 2, 2})) == 27);
  const Problem p = build_problem(config_from_json(
      {{"domain", {{"kind", "sequence"}, {"categories", std::vector<int>(13, 2)}}}}));
  try {
    verify_problem(p, 0);
    FAIL("expected refusal");
  } catch (const OracleCapExceeded& e) {
    CHECK(e.states() == 1594323);
    CHECK(std::string(e.what()).find("1594323") != std::string::npos);
  }
}
