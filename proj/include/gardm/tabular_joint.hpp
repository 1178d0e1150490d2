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

// Conditional-model contract and the exact tabular joint distribution that
// plays both the data distribution and the pretrained model.

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "gardm/core.hpp"
#include "gardm/rng.hpp"
#include "json.hpp"

namespace gardm {

class ConditionalModel {
 public:
  virtual ~ConditionalModel() = default;

  virtual const DomainPtr& domain() const = 0;

  // Distribution of variable `position` given the assigned values of
  // `partial`. `position` must be unassigned.
  virtual Categorical conditional(const MaskedSample& partial,
                                  std::size_t position) const = 0;
};

inline constexpr std::size_t kDefaultStateLimit = std::size_t{1} << 20;

class TabularJoint final : public ConditionalModel {
 public:
  // `probs` is row-major over the product space, variable 0 slowest.
  TabularJoint(DomainPtr domain, std::vector<double> probs,
               std::size_t state_limit = kDefaultStateLimit);
  TabularJoint(const TabularJoint& other);
  TabularJoint& operator=(const TabularJoint& other);
  TabularJoint(TabularJoint&&) noexcept;
  TabularJoint& operator=(TabularJoint&&) noexcept;
  ~TabularJoint() override;

  static TabularJoint uniform(DomainPtr domain);

  const DomainPtr& domain() const override { return domain_; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t state_count() const noexcept { return probs_.size(); }

  // Table entry of a fully assigned sample.
  double probability(const MaskedSample& full) const;

  // Sum of the joint over all completions of the unassigned variables.
  double marginal(const MaskedSample& partial) const;

  // Throws GuidanceError(kUnreachablePrefix) if marginal(partial) == 0.
  Categorical conditional(const MaskedSample& partial,
                          std::size_t position) const override;

  // Sum over the order of log conditionals; -inf for a zero-probability
  // sample.
  double loglik(const MaskedSample& sample, const GenerationOrder& order) const;

  // Exact draw of a fully assigned sample from one uniform.
  MaskedSample sample(double u) const;

 private:
  struct MarginalCache;

  void check_compatible(const MaskedSample& s) const;
  double enumerate_completions(const MaskedSample& partial) const;
  std::shared_ptr<const std::vector<double>> table_for(std::uint64_t mask) const;

  DomainPtr domain_;
  std::vector<double> probs_;
  std::unique_ptr<MarginalCache> cache_;
};

using JointPtr = std::shared_ptr<const TabularJoint>;

// Entry proportional to count(x) + smoothing. Throws on an empty dataset
// with zero smoothing.
TabularJoint fit_tabular(DomainPtr domain, std::span<const MaskedSample> dataset,
                         double smoothing = 1.0);

// (1 - uniform_mix) * p^(1/temperature) / Z + uniform_mix * uniform.
TabularJoint perturb(const TabularJoint& joint, double temperature, double uniform_mix);

// Dirichlet(concentration) draw over the product space.
TabularJoint random_joint(DomainPtr domain, double concentration, SplitMix64& rng);

nlohmann::json to_json(const TabularJoint& joint);
TabularJoint tabular_from_json(const nlohmann::json& doc);

}  // namespace gardm
