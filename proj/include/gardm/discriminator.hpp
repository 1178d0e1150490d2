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

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "gardm/core.hpp"
#include "gardm/rng.hpp"
#include "gardm/tabular_joint.hpp"

namespace gardm {

// Maps a partial sample to a logit l; d = sigmoid(l) is the probability the
// prefix came from the data and W = exp(l) is the density-ratio estimate.
// A fully masked input must return 0.
class Discriminator {
 public:
  virtual ~Discriminator() = default;
  virtual double logit(const MaskedSample& partial) const = 0;
};

using DiscriminatorPtr = std::shared_ptr<const Discriminator>;

// log p_data(prefix) - log p_theta(prefix).
class OptimalDiscriminator final : public Discriminator {
 public:
  OptimalDiscriminator(JointPtr p_data, JointPtr p_theta);

  // Throws GuidanceError(kSupportViolation) if p_theta's marginal is zero
  // where p_data's is not.
  double logit(const MaskedSample& partial) const override;

  const JointPtr& data() const noexcept { return p_data_; }
  const JointPtr& model() const noexcept { return p_theta_; }

 private:
  JointPtr p_data_;
  JointPtr p_theta_;
};

// Always `value` on non-empty prefixes.
class ConstantDiscriminator final : public Discriminator {
 public:
  explicit ConstantDiscriminator(double value = 0.0) : value_(value) {}
  double logit(const MaskedSample& partial) const override;

 private:
  double value_;
};

// Attenuation s(t) as a function of assigned count t and dimension D.
enum class AttenuationSchedule {
  kFinalStepExact,  // s = 1 for t < D, s(D) = 0
  kAllSteps,        // s = 1 everywhere
  kLinear,          // s = 1 - t / D
};

double attenuation(AttenuationSchedule schedule, std::size_t assigned, std::size_t dimension);

// logit'(x) = (1 - epsilon * s(t)) * logit(x).
class CorruptedDiscriminator final : public Discriminator {
 public:
  CorruptedDiscriminator(DiscriminatorPtr base, double epsilon,
                         AttenuationSchedule schedule = AttenuationSchedule::kFinalStepExact);
  double logit(const MaskedSample& partial) const override;

 private:
  DiscriminatorPtr base_;
  double epsilon_;
  AttenuationSchedule schedule_;
};

DiscriminatorPtr optimal_discriminator(JointPtr p_data, JointPtr p_theta);
DiscriminatorPtr corrupt(DiscriminatorPtr base, double epsilon,
                         AttenuationSchedule schedule = AttenuationSchedule::kFinalStepExact);

// d = sigmoid(logit), computed without overflow.
double discriminator_probability(double logit);

// Mean log d over real prefixes plus mean log(1 - d) over generated ones.
// Returns -inf if d is exactly 0 on a real prefix or 1 on a fake one.
double discriminator_loss(const Discriminator& disc, std::span<const MaskedSample> real_prefixes,
                          std::span<const MaskedSample> fake_prefixes);

// Prefixes under the loss's expectations: uniform order, uniform
// t in 1..D, x drawn from `joint` and masked beyond step t.
std::vector<MaskedSample> draw_loss_prefixes(const TabularJoint& joint, std::size_t count,
                                             SplitMix64& rng);

}  // namespace gardm
