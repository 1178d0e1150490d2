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

// Log-domain weight arithmetic and particle resampling primitives.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gardm {

inline constexpr double kLogitClamp = 60.0;

// Logit clamped to [-60, 60]; NaN is rejected. Applied before any
// exponentiation of a discriminator output.
double clamp_logit(double logit);

// log(sum(exp(x))); -inf if every entry is -inf (or the span is empty).
double log_sum_exp(std::span<const double> log_values);

// Max-subtracted softmax. Throws GuidanceError(kDegenerateParticles) when
// no entry is finite.
std::vector<double> normalize_weights(std::span<const double> log_weights);

// 1 / sum(w^2). Throws ContractViolation if weights do not sum to 1
// within 1e-6.
double effective_sample_size(std::span<const double> weights);

// Systematic resampling with offset u in [0, 1): ancestor indices, sorted
// ascending, N = weights.size().
std::vector<std::size_t> systematic_resample(std::span<const double> weights, double u);

}  // namespace gardm
