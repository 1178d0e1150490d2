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

// Foundational value types: categorical distributions, variable domains,
// partially assigned samples and generation orders.

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "gardm/rng.hpp"

namespace gardm {

inline constexpr double kProbabilityTolerance = 1e-9;

class Categorical {
 public:
  // Validates: entries >= 0 and summing to 1 within kProbabilityTolerance.
  explicit Categorical(std::vector<double> probs);

  // Normalizes nonnegative masses; throws if the total mass is zero.
  static Categorical from_masses(std::vector<double> masses);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t v) const { return probs_[v]; }
  std::span<const double> probs() const noexcept { return probs_; }

  // Inverse-CDF draw from one uniform u in [0, 1). Never returns a
  // zero-probability category.
  std::size_t sample(double u) const;

 private:
  std::vector<double> probs_;
};

// Per-variable category counts of a product space. Shared between all
// samples of one problem.
class Domain {
 public:
  explicit Domain(std::vector<int> categories);

  std::size_t dimension() const noexcept { return categories_.size(); }
  int categories(std::size_t position) const { return categories_.at(position); }
  std::span<const int> all_categories() const noexcept { return categories_; }

  // Product of category counts; saturates at SIZE_MAX on overflow.
  std::size_t state_count() const noexcept { return state_count_; }

  // Row-major stride of a variable (variable 0 slowest).
  std::size_t stride(std::size_t position) const { return strides_.at(position); }

  bool operator==(const Domain& other) const noexcept {
    return categories_ == other.categories_;
  }

 private:
  std::vector<int> categories_;
  std::vector<std::size_t> strides_;
  std::size_t state_count_ = 1;
};

using DomainPtr = std::shared_ptr<const Domain>;

DomainPtr make_domain(std::vector<int> categories);

// A sequence of discrete variables, each either unassigned or holding a
// category index valid for its position.
class MaskedSample {
 public:
  static constexpr int kUnassigned = -1;

  explicit MaskedSample(DomainPtr domain);
  MaskedSample(DomainPtr domain, std::vector<int> values);

  // Fully assigned sample decoded from a row-major state index.
  static MaskedSample from_state_index(DomainPtr domain, std::size_t index);

  const Domain& domain() const noexcept { return *domain_; }
  const DomainPtr& domain_ptr() const noexcept { return domain_; }
  std::size_t dimension() const noexcept { return values_.size(); }

  bool is_assigned(std::size_t position) const {
    return values_.at(position) != kUnassigned;
  }
  int value(std::size_t position) const { return values_.at(position); }
  std::span<const int> values() const noexcept { return values_; }

  std::size_t assigned_count() const noexcept { return assigned_count_; }
  bool is_complete() const noexcept { return assigned_count_ == values_.size(); }

  // Bit i set iff position i is assigned.
  std::uint64_t assigned_mask() const noexcept { return mask_; }

  void assign(std::size_t position, int value);
  void unassign(std::size_t position);

  // Row-major index of a fully assigned sample.
  std::size_t state_index() const;

  friend bool operator==(const MaskedSample& a, const MaskedSample& b) noexcept {
    return a.values_ == b.values_ && *a.domain_ == *b.domain_;
  }

 private:
  DomainPtr domain_;
  std::vector<int> values_;
  std::uint64_t mask_ = 0;
  std::size_t assigned_count_ = 0;
};

// A permutation sigma of {0, ..., D-1}; position t of the generation is
// variable perm[t].
class GenerationOrder {
 public:
  explicit GenerationOrder(std::vector<std::size_t> perm);

  static GenerationOrder identity(std::size_t dimension);

  std::size_t size() const noexcept { return perm_.size(); }
  std::size_t operator[](std::size_t t) const { return perm_[t]; }
  std::span<const std::size_t> perm() const noexcept { return perm_; }

  bool operator==(const GenerationOrder&) const = default;

 private:
  std::vector<std::size_t> perm_;
};

// Uniformly random permutation of {0, ..., dimension-1} (Fisher-Yates).
GenerationOrder uniform_order(std::size_t dimension, SplitMix64& rng);

// Restricts a full sample to the first `steps` positions of an order.
MaskedSample prefix_of(const MaskedSample& full, const GenerationOrder& order,
                       std::size_t steps);

}  // namespace gardm
