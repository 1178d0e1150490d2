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

#include "gardm/core.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "gardm/error.hpp"

namespace gardm {

Categorical::Categorical(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ContractViolation("categorical: no categories");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ContractViolation("categorical: negative or non-finite entry");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw ContractViolation("categorical: entries sum to " + std::to_string(total));
  }
}

Categorical Categorical::from_masses(std::vector<double> masses) {
  double total = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw ContractViolation("categorical: negative or non-finite mass");
    }
    total += m;
  }
  if (!(total > 0.0)) throw ContractViolation("categorical: zero total mass");
  for (double& m : masses) m /= total;
  return Categorical(std::move(masses));
}

std::size_t Categorical::sample(double u) const {
  if (!(u >= 0.0 && u < 1.0)) throw ContractViolation("categorical: u must lie in [0, 1)");
  double cumulative = 0.0;
  std::size_t last_live = 0;
  for (std::size_t v = 0; v < probs_.size(); ++v) {
    if (probs_[v] <= 0.0) continue;
    cumulative += probs_[v];
    last_live = v;
    if (u < cumulative) return v;
  }
  // u landed in the rounding gap above the final cumulative sum.
  return last_live;
}

Domain::Domain(std::vector<int> categories) : categories_(std::move(categories)) {
  if (categories_.empty()) throw ContractViolation("domain: no variables");
  if (categories_.size() > 64) {
    throw ContractViolation("domain: more than 64 variables");
  }
  strides_.assign(categories_.size(), 1);
  std::size_t stride = 1;
  bool overflow = false;
  for (std::size_t i = categories_.size(); i-- > 0;) {
    if (categories_[i] < 1) {
      throw ContractViolation("domain: variable " + std::to_string(i) +
                              " has fewer than one category");
    }
    strides_[i] = stride;
    const auto d = static_cast<std::size_t>(categories_[i]);
    if (stride > std::numeric_limits<std::size_t>::max() / d) {
      overflow = true;
    } else {
      stride *= d;
    }
  }
  state_count_ = overflow ? std::numeric_limits<std::size_t>::max() : stride;
}

DomainPtr make_domain(std::vector<int> categories) {
  return std::make_shared<const Domain>(std::move(categories));
}

MaskedSample::MaskedSample(DomainPtr domain)
    : domain_(std::move(domain)),
      values_(domain_->dimension(), kUnassigned) {}

MaskedSample::MaskedSample(DomainPtr domain, std::vector<int> values)
    : MaskedSample(std::move(domain)) {
  if (values.size() != values_.size()) {
    throw ContractViolation("masked sample: expected " +
                            std::to_string(values_.size()) + " values, got " +
                            std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != kUnassigned) assign(i, values[i]);
  }
}

MaskedSample MaskedSample::from_state_index(DomainPtr domain, std::size_t index) {
  MaskedSample s(domain);
  if (index >= domain->state_count()) {
    throw ContractViolation("masked sample: state index out of range");
  }
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    const std::size_t stride = domain->stride(i);
    s.assign(i, static_cast<int>(index / stride));
    index %= stride;
  }
  return s;
}

void MaskedSample::assign(std::size_t position, int value) {
  if (position >= values_.size()) {
    throw ContractViolation("masked sample: position out of range");
  }
  if (value < 0 || value >= domain_->categories(position)) {
    throw ContractViolation("masked sample: value " + std::to_string(value) +
                            " invalid at position " + std::to_string(position));
  }
  if (values_[position] == kUnassigned) {
    ++assigned_count_;
    mask_ |= (std::uint64_t{1} << position);
  }
  values_[position] = value;
}

void MaskedSample::unassign(std::size_t position) {
  if (values_.at(position) == kUnassigned) return;
  values_[position] = kUnassigned;
  --assigned_count_;
  mask_ &= ~(std::uint64_t{1} << position);
}

std::size_t MaskedSample::state_index() const {
  if (!is_complete()) {
    throw ContractViolation("masked sample: state index of a partial sample");
  }
  std::size_t index = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    index += static_cast<std::size_t>(values_[i]) * domain_->stride(i);
  }
  return index;
}

GenerationOrder::GenerationOrder(std::vector<std::size_t> perm) : perm_(std::move(perm)) {
  std::vector<bool> seen(perm_.size(), false);
  for (std::size_t v : perm_) {
    if (v >= perm_.size() || seen[v]) {
      throw ContractViolation("generation order: not a permutation");
    }
    seen[v] = true;
  }
}

GenerationOrder GenerationOrder::identity(std::size_t dimension) {
  std::vector<std::size_t> perm(dimension);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  return GenerationOrder(std::move(perm));
}

GenerationOrder uniform_order(std::size_t dimension, SplitMix64& rng) {
  std::vector<std::size_t> perm(dimension);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = dimension; i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
  }
  return GenerationOrder(std::move(perm));
}

MaskedSample prefix_of(const MaskedSample& full, const GenerationOrder& order,
                       std::size_t steps) {
  if (order.size() != full.dimension() || steps > order.size()) {
    throw ContractViolation("prefix_of: order/steps mismatch");
  }
  MaskedSample prefix(full.domain_ptr());
  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t pos = order[t];
    if (!full.is_assigned(pos)) {
      throw ContractViolation("prefix_of: source sample not assigned along order");
    }
    prefix.assign(pos, full.value(pos));
  }
  return prefix;
}

}  // namespace gardm
