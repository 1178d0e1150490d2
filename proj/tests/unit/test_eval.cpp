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
#include <sstream>
#include <string>

#include "doctest.h"
#include "gardm/config.hpp"
#include "gardm/error.hpp"
#include "gardm/eval.hpp"
#include "gardm/samplers.hpp"
#include "oracles.hpp"

using namespace gardm;
using nlohmann::json;

namespace {

RunConfig small_config(std::size_t samples) {
  json doc = {{"domain", {{"kind", "sequence"}, {"categories", {2, 2}}}},
              {"samples", samples},
              {"seed", 5}};
  return config_from_json(doc);
}

}  // namespace

TEST_CASE("tv distance and histogram") {
  const DomainPtr d = make_domain({2, 2});
  const std::vector<MaskedSample> xs{MaskedSample(d, {0, 0}), MaskedSample(d, {0, 0}),
                                     MaskedSample(d, {1, 1}), MaskedSample(d, {1, 0})};
  const Histogram h = empirical_distribution(xs);
  CHECK(h.freq == std::vector<double>{0.5, 0.0, 0.25, 0.25});
  const TabularJoint u = TabularJoint::uniform(d);
  CHECK(tv_distance(h, u) == doctest::Approx(0.25));
  CHECK_THROWS_AS(empirical_distribution(std::vector<MaskedSample>{}), ContractViolation);
  CHECK_THROWS_AS(tv_distance(h, TabularJoint::uniform(make_domain({4}))), ContractViolation);
  CHECK(tv_noise_band(u, 100) == doctest::Approx(1.5 * 4 * std::sqrt(0.25 * 0.75 / 100)));
}

TEST_CASE("closed-form evaluation counts") {
  CHECK(expected_counters(Method::kArdm, 10, 30, 5) == EvalCounters{10, 0});
  CHECK(expected_counters(Method::kArdg, 10, 30, 5) == EvalCounters{10, 30});
  CHECK(expected_counters(Method::kBsdg, 10, 30, 5) == EvalCounters{50, 50});
  CHECK(expected_counters(Method::kFadg, 10, 30, 5) == EvalCounters{50, 150});
}

TEST_CASE("minimal run produces four healthy cells") {
  const RunConfig config = small_config(10);
  const Problem problem = build_problem(config);
  const RunReport report = run_experiment(config, problem);
  REQUIRE(report.cells.size() == 4);
  CHECK(report.all_ok());
  for (const CellReport& c : report.cells) {
    CHECK(c.metrics.count("tv") == 1);
    CHECK(c.metrics.count("validity") == 0);
    CHECK(c.metrics.at("tv").samples == 10);
  }
  CHECK(report.find(Method::kBsdg, OrderKind::kUniform)->particles == 10);
  CHECK(report.find(Method::kArdm, OrderKind::kUniform)->counters == EvalCounters{20, 0});
  CHECK(report.find(Method::kBsdg, OrderKind::kUniform)->counters == EvalCounters{200, 200});
  const json doc = to_json(report, false);
  CHECK(doc["cells"].size() == 4);
  CHECK_FALSE(doc["cells"][0].contains("wall_clock_seconds"));
  const std::string csv = to_csv(report);
  CHECK(csv.rfind("method,order,N,metric,value,samples,seed\n", 0) == 0);
}

TEST_CASE("N=1 smc cells reproduce the ardm and ardg cells") {
  RunConfig config = small_config(300);
  config.particles = 1;
  config.discriminator.kind = DiscriminatorKind::kCorrupt;
  config.discriminator.epsilon = 0.5;
  const Problem problem = build_problem(config);
  const RunReport report = run_experiment(config, problem);
  const auto& ardm = *report.find(Method::kArdm, OrderKind::kUniform);
  const auto& ardg = *report.find(Method::kArdg, OrderKind::kUniform);
  const auto& bsdg = *report.find(Method::kBsdg, OrderKind::kUniform);
  const auto& fadg = *report.find(Method::kFadg, OrderKind::kUniform);
  for (const auto* pair : {&bsdg, &fadg}) {
    const auto& ref = pair == &bsdg ? ardm : ardg;
    for (const auto& [name, m] : ref.metrics) {
      CHECK(pair->metrics.at(name).value == m.value);
      CHECK(pair->metrics.at(name).stderr_ == m.stderr_);
    }
  }
}

TEST_CASE("results are independent of the thread count") {
  const RunConfig config = small_config(200);
  const Problem problem = build_problem(config);
  const RunReport one = run_experiment(config, problem, 1);
  const RunReport four = run_experiment(config, problem, 4);
  CHECK(to_json(one, false) == to_json(four, false));
  CHECK(to_csv(one) == to_csv(four));
}

TEST_CASE("graph runs report validity and uniqueness") {
  json doc = {{"domain", {{"kind", "graph"}}},
              {"p_data", {{"node_count_weights", {{"2", 1.0}, {"3", 1.0}}}, {"dataset_size", 300}}},
              {"orders", {"uniform", "NsEs", "NEsN"}},
              {"methods", {"ARDM", "FADG"}},
              {"particles", 3},
              {"samples", 60}};
  const RunConfig config = config_from_json(doc);
  const RunReport report = run_experiment(config, build_problem(config));
  REQUIRE(report.cells.size() == 6);
  CHECK(report.all_ok());
  for (const CellReport& c : report.cells) {
    const Metric& v = c.metrics.at("validity");
    CHECK(v.value >= 0.0);
    CHECK(v.value <= 1.0);
    CHECK(c.metrics.at("uniqueness").value <= 1.0);
  }
}

TEST_CASE("keep_all_particles weights every final particle") {
  RunConfig config = small_config(50);
  config.keep_all_particles = true;
  config.methods = {Method::kBsdg};
  const RunReport report = run_experiment(config, build_problem(config));
  CHECK(report.all_ok());
  CHECK(report.cells[0].metrics.at("tv").value <= 1.0);
}

namespace {

class ThrowingDiscriminator final : public Discriminator {
 public:
  double logit(const MaskedSample& partial) const override {
    if (partial.is_complete()) throw GuidanceError(GuidanceErrorKind::kSupportViolation, "test");
    return 0.0;
  }
};

}  // namespace

TEST_CASE("failed cells are reported and the run continues") {
  const RunConfig config = small_config(4);
  Problem problem = build_problem(config);
  problem.cases[0].discriminator = std::make_shared<const ThrowingDiscriminator>();
  const RunReport report = run_experiment(config, problem);
  CHECK_FALSE(report.all_ok());
  REQUIRE(report.cells.size() == 4);
  CHECK(report.find(Method::kArdm, OrderKind::kUniform)->ok);
  const CellReport& bsdg = *report.find(Method::kBsdg, OrderKind::kUniform);
  CHECK_FALSE(bsdg.ok);
  CHECK(bsdg.error.find("support violation") != std::string::npos);
  CHECK(bsdg.failure_diagnostics.contains("ess_trace"));
  CHECK(to_csv(report).find(",failed,") != std::string::npos);
  CHECK(to_json(report, false)["cells"][2]["status"] == "failed");
}

TEST_CASE("mismatched support degrades quality without failing") {
  json doc = {{"domain", {{"kind", "sequence"}, {"categories", {2}}}},
              {"p_data", {{"source", "table"}, {"table", {{"categories", {2}}, {"probs", {0.5, 0.5}}}}}},
              {"perturbation", {{"table", {{"categories", {2}}, {"probs", {1.0, 0.0}}}}}},
              {"samples", 40}};
  const RunConfig config = config_from_json(doc);
  const RunReport report = run_experiment(config, build_problem(config));
  CHECK(report.all_ok());
  for (const CellReport& c : report.cells) CHECK(c.metrics.at("tv").value == doctest::Approx(0.5));
}

TEST_CASE("stderr of the tv metric is a bootstrap estimate") {
  const RunConfig config = small_config(400);
  const RunReport report = run_experiment(config, build_problem(config));
  const Metric& tv = report.cells[0].metrics.at("tv");
  CHECK(tv.stderr_ > 0.0);
  CHECK(tv.stderr_ < 0.1);
}

TEST_CASE("tv distance worked examples") {
  const DomainPtr d = make_domain({2});
  const std::vector<MaskedSample> six_four{
      MaskedSample(d, {0}), MaskedSample(d, {0}), MaskedSample(d, {0}), MaskedSample(d, {1}),
      MaskedSample(d, {1}), MaskedSample(d, {0}), MaskedSample(d, {0}), MaskedSample(d, {1}),
      MaskedSample(d, {0}), MaskedSample(d, {1})};
  CHECK(tv_distance(empirical_distribution(six_four), TabularJoint::uniform(d)) ==
        doctest::Approx(0.1));
  const std::vector<MaskedSample> ones{MaskedSample(d, {1}), MaskedSample(d, {1})};
  const Histogram h = empirical_distribution(ones);
  CHECK(h.freq == std::vector<double>{0.0, 1.0});
  CHECK(tv_distance(h, TabularJoint(d, {0.0, 1.0})) == 0.0);
  CHECK(tv_distance(h, TabularJoint(d, {1.0, 0.0})) == 1.0);
}

TEST_CASE("ARDM histogram converges to p_theta") {
  SplitMix64 rng(2);
  const DomainPtr d = make_domain({2, 2, 2});
  const TabularJoint theta(d, oracle::random_table(8, rng));
  std::vector<MaskedSample> xs;
  for (std::size_t k = 0; k < 100000; ++k) {
    const RngStreams streams(mix_seed(2, k));
    SplitMix64 order_rng = streams.stream(StreamPurpose::kOrder);
    xs.push_back(ardm_sample(theta, uniform_order(3, order_rng), streams).sample);
  }
  CHECK(tv_distance(empirical_distribution(xs), theta) <= 0.01);
}

TEST_CASE("M=0 yields empty metrics and zero counters") {
  const RunConfig config = small_config(0);
  const RunReport report = run_experiment(config, build_problem(config));
  CHECK(report.all_ok());
  for (const CellReport& c : report.cells) {
    CHECK(c.metrics.empty());
    CHECK(c.counters == EvalCounters{});
  }
}

TEST_CASE("FADG cell disc evaluations at D=10, d=3, N=5, M=100") {
  json doc = {{"domain", {{"kind", "sequence"}, {"categories", std::vector<int>(10, 3)}}},
              {"methods", {"FADG"}},
              {"particles", 5},
              {"samples", 100}};
  const RunConfig config = config_from_json(doc);
  const RunReport report = run_experiment(config, build_problem(config));
  REQUIRE(report.all_ok());
  CHECK(report.cells[0].counters.disc_evals == 100 * 150);
  CHECK(report.cells[0].counters.model_evals == 100 * 50);
}

TEST_CASE("optimal guidance on the toy-graph benchmark raises validity") {
  json doc = {{"domain", {{"kind", "graph"}}},
              {"p_data", {{"smoothing", 0.0}}},
              {"methods", {"ARDM", "BSDG", "FADG"}},
              {"samples", 2000},
              {"seed", 9}};
  const RunConfig config = config_from_json(doc);
  const RunReport report = run_experiment(config, build_problem(config));
  REQUIRE(report.all_ok());
  const Metric& base = report.cells[0].metrics.at("validity");
  for (std::size_t k = 1; k < 3; ++k) {
    const Metric& v = report.cells[k].metrics.at("validity");
    const double pooled = 0.5 * (base.value + v.value);
    const double se = std::sqrt(pooled * (1 - pooled) * 2.0 / 2000.0);
    CHECK(v.value - base.value > -1.645 * se);
    CHECK(v.value >= base.value);
  }
}
