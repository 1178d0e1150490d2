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

#include "gardm/discriminator.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "gardm/error.hpp"

namespace gardm {

OptimalDiscriminator::OptimalDiscriminator(JointPtr p_data, JointPtr p_theta)
    : p_data_(std::move(p_data)), p_theta_(std::move(p_theta)) {
  if (!p_data_ || !p_theta_) throw ContractViolation("optimal discriminator: null joint");
  if (!(*p_data_->domain() == *p_theta_->domain())) {
    throw ContractViolation("optimal discriminator: joints have different domains");
  }
}

double OptimalDiscriminator::logit(const MaskedSample& partial) const {
  if (partial.assigned_count() == 0) return 0.0;
  const double data = p_data_->marginal(partial);
  const double model = p_theta_->marginal(partial);
  if (model <= 0.0) {
    if (data > 0.0) {
      throw GuidanceError(GuidanceErrorKind::kSupportViolation,
                          "model assigns zero probability to a data-reachable prefix");
    }
    throw GuidanceError(GuidanceErrorKind::kUnreachablePrefix,
                        "prefix unreachable under both distributions");
  }
  if (data <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(data) - std::log(model);
}

double ConstantDiscriminator::logit(const MaskedSample& partial) const {
  return partial.assigned_count() == 0 ? 0.0 : value_;
}

double attenuation(AttenuationSchedule schedule, std::size_t assigned, std::size_t dimension) {
  switch (schedule) {
    case AttenuationSchedule::kFinalStepExact:
      return assigned < dimension ? 1.0 : 0.0;
    case AttenuationSchedule::kAllSteps:
      return 1.0;
    case AttenuationSchedule::kLinear:
      return dimension == 0 ? 0.0
                            : 1.0 - static_cast<double>(assigned) / static_cast<double>(dimension);
  }
  return 1.0;
}

CorruptedDiscriminator::CorruptedDiscriminator(DiscriminatorPtr base, double epsilon,
                                               AttenuationSchedule schedule)
    : base_(std::move(base)), epsilon_(epsilon), schedule_(schedule) {
  if (!base_) throw ContractViolation("corrupt: null base discriminator");
  if (!(epsilon_ >= 0.0 && epsilon_ <= 1.0)) {
    throw ContractViolation("corrupt: epsilon must lie in [0, 1]");
  }
}

double CorruptedDiscriminator::logit(const MaskedSample& partial) const {
  const double base = base_->logit(partial);
  const double scale =
      1.0 - epsilon_ * attenuation(schedule_, partial.assigned_count(), partial.dimension());
  if (scale == 1.0) return base;
  // Full attenuation carries no evidence, even from an infinite base logit.
  if (scale == 0.0) return 0.0;
  return scale * base;
}

DiscriminatorPtr optimal_discriminator(JointPtr p_data, JointPtr p_theta) {
  return std::make_shared<OptimalDiscriminator>(std::move(p_data), std::move(p_theta));
}

DiscriminatorPtr corrupt(DiscriminatorPtr base, double epsilon, AttenuationSchedule schedule) {
  return std::make_shared<CorruptedDiscriminator>(std::move(base), epsilon, schedule);
}

double discriminator_probability(double logit) {
  if (logit >= 0.0) return 1.0 / (1.0 + std::exp(-logit));
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

namespace {

// log(sigmoid(l)) = -softplus(-l).
double log_sigmoid(double l) {
  if (l == -std::numeric_limits<double>::infinity()) return l;
  if (l == std::numeric_limits<double>::infinity()) return 0.0;
  return l >= 0.0 ? -std::log1p(std::exp(-l)) : l - std::log1p(std::exp(l));
}

}  // namespace

double discriminator_loss(const Discriminator& disc, std::span<const MaskedSample> real_prefixes,
                          std::span<const MaskedSample> fake_prefixes) {
  if (real_prefixes.empty() || fake_prefixes.empty()) {
    throw ContractViolation("discriminator_loss: both prefix sets must be non-empty");
  }
  double real_term = 0.0;
  for (const MaskedSample& x : real_prefixes) real_term += log_sigmoid(disc.logit(x));
  double fake_term = 0.0;
  for (const MaskedSample& x : fake_prefixes) fake_term += log_sigmoid(-disc.logit(x));
  return real_term / static_cast<double>(real_prefixes.size()) +
         fake_term / static_cast<double>(fake_prefixes.size());
}

std::vector<MaskedSample> draw_loss_prefixes(const TabularJoint& joint, std::size_t count,
                                             SplitMix64& rng) {
  const std::size_t dim = joint.domain()->dimension();
  std::vector<MaskedSample> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const GenerationOrder order = uniform_order(dim, rng);
    const std::size_t steps = 1 + rng.uniform_index(dim);
    const MaskedSample full = joint.sample(rng.uniform01());
    out.push_back(prefix_of(full, order, steps));
  }
  return out;
}

}  // namespace gardm
