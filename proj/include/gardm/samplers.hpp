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

// Plain order-agnostic ancestral sampling and per-step discriminator
// guided sampling.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gardm/core.hpp"
#include "gardm/discriminator.hpp"
#include "gardm/rng.hpp"
#include "gardm/tabular_joint.hpp"

namespace gardm {

struct EvalCounters {
  std::uint64_t model_evals = 0;
  std::uint64_t disc_evals = 0;

  std::uint64_t total() const noexcept { return model_evals + disc_evals; }

  EvalCounters& operator+=(const EvalCounters& other) noexcept {
    model_evals += other.model_evals;
    disc_evals += other.disc_evals;
    return *this;
  }
  bool operator==(const EvalCounters&) const = default;
};

// One guided step: base conditional, per-candidate clamped log W and the
// corrected distribution proportional to W * base.
struct StepDistribution {
  std::size_t position = 0;
  Categorical base;
  Categorical corrected;
  // -inf marks candidates skipped because base[v] == 0.
  std::vector<double> log_w;
  // log C = log sum_v W(prefix + v) * base[v].
  double log_normalizer = 0.0;
  EvalCounters evals;
};

// Throws GuidanceError(kAnnihilatedSupport) if every corrected mass is 0.
StepDistribution ardg_step(const ConditionalModel& model, const Discriminator& disc,
                           const MaskedSample& partial, std::size_t position);

// As ardg_step, but an annihilated step is returned with log_normalizer
// -inf and corrected == base instead of throwing.
StepDistribution guided_step(const ConditionalModel& model, const Discriminator& disc,
                           const MaskedSample& partial, std::size_t position);

struct SampleResult {
  MaskedSample sample;
  EvalCounters counters;
};

// Draws in order: step t consumes one uniform from (kPropagate, t, particle).
SampleResult ardm_sample(const ConditionalModel& model, const GenerationOrder& order,
                         const RngStreams& streams, std::size_t particle = 0);

SampleResult ardg_sample(const ConditionalModel& model, const Discriminator& disc,
                         const GenerationOrder& order, const RngStreams& streams,
                         std::size_t particle = 0);

}  // namespace gardm
