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

#include "gardm/samplers.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "gardm/error.hpp"
#include "gardm/weights.hpp"

namespace gardm {
namespace {

void check_order(const ConditionalModel& model, const GenerationOrder& order) {
  if (order.size() != model.domain()->dimension()) {
    throw ContractViolation("sampler: order length does not match model dimension");
  }
}

}  // namespace

StepDistribution guided_step(const ConditionalModel& model, const Discriminator& disc,
                             const MaskedSample& partial, std::size_t position) {
  Categorical base = model.conditional(partial, position);
  EvalCounters evals{1, 0};
  const std::size_t d = base.size();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> log_w(d, kNegInf);
  std::vector<double> log_mass(d, kNegInf);
  MaskedSample candidate = partial;
  for (std::size_t v = 0; v < d; ++v) {
    if (base[v] <= 0.0) continue;
    candidate.assign(position, static_cast<int>(v));
    log_w[v] = clamp_logit(disc.logit(candidate));
    ++evals.disc_evals;
    log_mass[v] = log_w[v] + std::log(base[v]);
  }
  const double log_c = log_sum_exp(log_mass);
  if (!std::isfinite(log_c)) {
    Categorical fallback = base;
    return StepDistribution{position, std::move(base), std::move(fallback), std::move(log_w),
                            log_c, evals};
  }
  std::vector<double> corrected(d, 0.0);
  double total = 0.0;
  for (std::size_t v = 0; v < d; ++v) {
    if (log_mass[v] == kNegInf) continue;
    corrected[v] = std::exp(log_mass[v] - log_c);
    total += corrected[v];
  }
  for (double& p : corrected) p /= total;
  return StepDistribution{position,      std::move(base), Categorical(std::move(corrected)),
                          std::move(log_w), log_c,         evals};
}

StepDistribution ardg_step(const ConditionalModel& model, const Discriminator& disc,
                           const MaskedSample& partial, std::size_t position) {
  StepDistribution step = guided_step(model, disc, partial, position);
  if (!std::isfinite(step.log_normalizer)) {
    throw GuidanceError(GuidanceErrorKind::kAnnihilatedSupport,
                        "no candidate keeps positive corrected mass");
  }
  return step;
}

SampleResult ardm_sample(const ConditionalModel& model, const GenerationOrder& order,
                         const RngStreams& streams, std::size_t particle) {
  check_order(model, order);
  SampleResult result{MaskedSample(model.domain()), {}};
  for (std::size_t t = 0; t < order.size(); ++t) {
    const std::size_t pos = order[t];
    const Categorical cond = model.conditional(result.sample, pos);
    ++result.counters.model_evals;
    const double u = streams.uniform(StreamPurpose::kPropagate, t + 1, particle);
    result.sample.assign(pos, static_cast<int>(cond.sample(u)));
  }
  return result;
}

SampleResult ardg_sample(const ConditionalModel& model, const Discriminator& disc,
                         const GenerationOrder& order, const RngStreams& streams,
                         std::size_t particle) {
  check_order(model, order);
  SampleResult result{MaskedSample(model.domain()), {}};
  for (std::size_t t = 0; t < order.size(); ++t) {
    const std::size_t pos = order[t];
    const StepDistribution step = ardg_step(model, disc, result.sample, pos);
    result.counters += step.evals;
    const double u = streams.uniform(StreamPurpose::kPropagate, t + 1, particle);
    result.sample.assign(pos, static_cast<int>(step.corrected.sample(u)));
  }
  return result;
}

}  // namespace gardm
