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

#include "gardm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "gardm/discriminator.hpp"
#include "gardm/error.hpp"
#include "gardm/samplers.hpp"
#include "gardm/smc.hpp"

namespace gardm {

std::size_t partial_state_count(const Domain& domain) noexcept {
  std::size_t total = 1;
  for (int d : domain.all_categories()) {
    const auto f = static_cast<std::size_t>(d) + 1;
    if (total > std::numeric_limits<std::size_t>::max() / f) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= f;
  }
  return total;
}

OracleCapExceeded::OracleCapExceeded(std::size_t states, std::size_t cap)
    : std::runtime_error("oracle cap exceeded: " + std::to_string(states) +
                         " partial states (cap " + std::to_string(cap) + ")"),
      states_(states) {}

bool VerifyReport::all_passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string VerifyReport::render() const {
  std::ostringstream out;
  for (const CheckResult& c : checks) {
    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name;
    if (!c.detail.empty()) out << ": " << c.detail;
    out << '\n';
  }
  return out.str();
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

// Calls fn on every partial assignment of the domain.
void for_each_partial(const DomainPtr& domain, const std::function<void(const MaskedSample&)>& fn) {
  MaskedSample s(domain);
  const std::size_t dim = domain->dimension();
  std::function<void(std::size_t)> rec = [&](std::size_t pos) {
    if (pos == dim) {
      fn(s);
      return;
    }
    rec(pos + 1);
    for (int v = 0; v < domain->categories(pos); ++v) {
      s.assign(pos, v);
      rec(pos + 1);
      s.unassign(pos);
    }
  };
  rec(0);
}

CheckResult check_support(const TabularJoint& p_data, const TabularJoint& p_theta) {
  std::size_t violations = 0;
  std::size_t first = 0;
  for (std::size_t i = 0; i < p_data.state_count(); ++i) {
    if (p_data.probs()[i] > 0.0 && p_theta.probs()[i] == 0.0) {
      if (violations++ == 0) first = i;
    }
  }
  if (violations == 0) return {"support", true, "p_theta covers the support of p_data"};
  return {"support", false,
          "support violation: p_theta is zero on " + std::to_string(violations) +
              " state(s) where p_data is positive (first state index " + std::to_string(first) +
              ")"};
}

CheckResult check_exactness(const JointPtr& p_data, const DiscriminatorPtr& disc,
                            const TabularJoint& p_theta) {
  double worst = 0.0;
  std::size_t prefixes = 0;
  for_each_partial(p_data->domain(), [&](const MaskedSample& partial) {
    if (partial.is_complete() || p_data->marginal(partial) <= 0.0) return;
    ++prefixes;
    for (std::size_t pos = 0; pos < partial.dimension(); ++pos) {
      if (partial.is_assigned(pos)) continue;
      const StepDistribution step = ardg_step(p_theta, *disc, partial, pos);
      const Categorical exact = p_data->conditional(partial, pos);
      for (std::size_t v = 0; v < exact.size(); ++v) {
        worst = std::max(worst, std::abs(step.corrected[v] - exact[v]));
      }
    }
  });
  return {"ardg_step_exactness", worst <= kVerifyTolerance,
          std::to_string(prefixes) + " reachable prefixes, max |diff| " + fmt(worst)};
}

CheckResult check_telescoping(const JointPtr& p_data, const JointPtr& p_theta,
                              const DiscriminatorPtr& disc, std::uint64_t seed) {
  const DomainPtr& domain = p_data->domain();
  const RngStreams streams(seed);
  double worst = 0.0;
  std::size_t states = 0;
  for (std::size_t i = 0; i < p_data->state_count(); ++i) {
    if (p_data->probs()[i] <= 0.0) continue;
    ++states;
    const MaskedSample full = MaskedSample::from_state_index(domain, i);
    SplitMix64 rng = streams.stream(StreamPurpose::kOrder, 0, i);
    const GenerationOrder order = uniform_order(domain->dimension(), rng);
    double sum = 0.0;
    double prev = 0.0;
    for (std::size_t t = 1; t <= order.size(); ++t) {
      const double l = disc->logit(prefix_of(full, order, t));
      sum += l - prev;
      prev = l;
    }
    const double want = std::log(p_data->probs()[i]) - std::log(p_theta->probs()[i]);
    worst = std::max(worst, std::abs(sum - want));
  }
  return {"telescoping_identity", worst <= kVerifyTolerance,
          std::to_string(states) + " states, max |diff| " + fmt(worst)};
}

CheckResult check_gamma_recursion(const JointPtr& p_data, const JointPtr& p_theta,
                                  const DiscriminatorPtr& disc, std::uint64_t seed) {
  const DomainPtr& domain = p_data->domain();
  const RngStreams streams(seed);
  double worst = 0.0;
  double worst_target = 0.0;
  for (std::size_t i = 0; i < p_data->state_count(); ++i) {
    if (p_data->probs()[i] <= 0.0) continue;
    const MaskedSample full = MaskedSample::from_state_index(domain, i);
    SplitMix64 rng = streams.stream(StreamPurpose::kOrder, 1, i);
    const GenerationOrder order = uniform_order(domain->dimension(), rng);
    MaskedSample prefix(domain);
    double gamma_prev = 1.0;
    double logit_prev = 0.0;
    for (std::size_t t = 1; t <= order.size(); ++t) {
      const std::size_t pos = order[t - 1];
      const Categorical cond = p_theta->conditional(prefix, pos);
      prefix.assign(pos, full.value(pos));
      const double logit = disc->logit(prefix);
      const double gamma = std::exp(logit) * p_theta->marginal(prefix);
      const double recursed =
          std::exp(logit - logit_prev) * cond[static_cast<std::size_t>(full.value(pos))] *
          gamma_prev;
      worst = std::max(worst, std::abs(gamma - recursed) / std::max(gamma, 1e-300));
      gamma_prev = gamma;
      logit_prev = logit;
    }
    worst_target = std::max(worst_target, std::abs(gamma_prev - p_data->probs()[i]));
  }
  return {"gamma_recursion", worst <= kVerifyTolerance && worst_target <= kVerifyTolerance,
          "max relative step error " + fmt(worst) + ", max |gamma_D - p_data| " +
              fmt(worst_target)};
}

CheckResult check_reductions(const TabularJoint& p_theta, const DiscriminatorPtr& disc,
                             std::uint64_t seed, std::size_t runs) {
  const DomainPtr& domain = p_theta.domain();
  const SmcOptions options{1, kDefaultEssThreshold, false};
  std::size_t mismatches = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    const RngStreams streams(mix_seed(seed, r));
    SplitMix64 rng = streams.stream(StreamPurpose::kOrder);
    const GenerationOrder order = uniform_order(domain->dimension(), rng);
    const SampleResult ardm = ardm_sample(p_theta, order, streams);
    const SampleResult ardg = ardg_sample(p_theta, *disc, order, streams);
    const SmcResult bsdg = bsdg_sample(p_theta, *disc, order, options, streams);
    const SmcResult fadg = fadg_sample(p_theta, *disc, order, options, streams);
    if (!(bsdg.sample == ardm.sample)) ++mismatches;
    if (!(fadg.sample == ardg.sample)) ++mismatches;
  }
  return {"n1_reductions", mismatches == 0,
          std::to_string(runs) + " seeded runs, " + std::to_string(mismatches) + " mismatches"};
}

}  // namespace

VerifyReport verify_pair(const JointPtr& p_data, const JointPtr& p_theta, std::uint64_t seed,
                         std::size_t reduction_runs) {
  if (!p_data || !p_theta || !(*p_data->domain() == *p_theta->domain())) {
    throw ContractViolation("verify_pair: p_data and p_theta must share a domain");
  }
  const std::size_t states = partial_state_count(*p_data->domain());
  if (states > kOracleStateCap) throw OracleCapExceeded(states, kOracleStateCap);

  VerifyReport report;
  report.checks.push_back(check_support(*p_data, *p_theta));
  if (!report.checks.back().passed) return report;
  const DiscriminatorPtr disc = optimal_discriminator(p_data, p_theta);
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      report.checks.push_back(fn());
    } catch (const std::exception& e) {
      report.checks.push_back({name, false, e.what()});
    }
  };
  guarded("ardg_step_exactness", [&] { return check_exactness(p_data, disc, *p_theta); });
  guarded("telescoping_identity", [&] { return check_telescoping(p_data, p_theta, disc, seed); });
  guarded("gamma_recursion", [&] { return check_gamma_recursion(p_data, p_theta, disc, seed); });
  guarded("n1_reductions", [&] { return check_reductions(*p_theta, disc, seed, reduction_runs); });
  return report;
}

VerifyReport verify_problem(const Problem& problem, std::uint64_t seed) {
  for (const DimensionCase& c : problem.cases) {
    const std::size_t states = partial_state_count(*c.domain);
    if (states > kOracleStateCap) throw OracleCapExceeded(states, kOracleStateCap);
  }
  VerifyReport report;
  for (std::size_t k = 0; k < problem.cases.size(); ++k) {
    const DimensionCase& c = problem.cases[k];
    VerifyReport part = verify_pair(c.p_data, c.p_theta, mix_seed(seed, k));
    for (CheckResult& r : part.checks) {
      if (problem.cases.size() > 1) r.name += " [n=" + std::to_string(c.nodes) + "]";
      report.checks.push_back(std::move(r));
    }
  }
  return report;
}

}  // namespace gardm
