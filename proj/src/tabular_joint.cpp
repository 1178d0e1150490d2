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

#include "gardm/tabular_joint.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>

#include "gardm/error.hpp"

namespace gardm {
namespace {

// Marginals with at most this many completions are summed directly;
// coarser prefixes go through a cached projected table.
constexpr std::size_t kDirectEnumerationLimit = 4096;
// Total cached doubles per joint before the cache is dropped.
constexpr std::size_t kCacheBudget = std::size_t{1} << 24;

}  // namespace

struct TabularJoint::MarginalCache {
  std::shared_mutex mutex;
  std::unordered_map<std::uint64_t, std::shared_ptr<const std::vector<double>>> tables;
  std::size_t cached_entries = 0;
};

TabularJoint::TabularJoint(DomainPtr domain, std::vector<double> probs,
                           std::size_t state_limit)
    : domain_(std::move(domain)),
      probs_(std::move(probs)),
      cache_(std::make_unique<MarginalCache>()) {
  if (!domain_) throw ContractViolation("tabular joint: null domain");
  if (domain_->state_count() > state_limit) {
    throw ContractViolation("tabular joint: " + std::to_string(domain_->state_count()) +
                            " states exceed the limit of " + std::to_string(state_limit));
  }
  if (probs_.size() != domain_->state_count()) {
    throw ContractViolation("tabular joint: expected " +
                            std::to_string(domain_->state_count()) +
                            " probabilities, got " + std::to_string(probs_.size()));
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ContractViolation("tabular joint: negative or non-finite probability");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw ContractViolation("tabular joint: probabilities sum to " + std::to_string(total));
  }
}

TabularJoint::TabularJoint(const TabularJoint& other)
    : domain_(other.domain_),
      probs_(other.probs_),
      cache_(std::make_unique<MarginalCache>()) {}

TabularJoint& TabularJoint::operator=(const TabularJoint& other) {
  if (this != &other) {
    domain_ = other.domain_;
    probs_ = other.probs_;
    cache_ = std::make_unique<MarginalCache>();
  }
  return *this;
}

TabularJoint::TabularJoint(TabularJoint&&) noexcept = default;
TabularJoint& TabularJoint::operator=(TabularJoint&&) noexcept = default;
TabularJoint::~TabularJoint() = default;

TabularJoint TabularJoint::uniform(DomainPtr domain) {
  const std::size_t n = domain->state_count();
  return TabularJoint(std::move(domain), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

void TabularJoint::check_compatible(const MaskedSample& s) const {
  if (!(s.domain() == *domain_)) {
    throw ContractViolation("tabular joint: sample domain does not match joint");
  }
}

double TabularJoint::probability(const MaskedSample& full) const {
  check_compatible(full);
  return probs_[full.state_index()];
}

double TabularJoint::enumerate_completions(const MaskedSample& partial) const {
  const std::size_t dim = domain_->dimension();
  std::size_t base = 0;
  std::vector<std::size_t> free_vars;
  for (std::size_t i = 0; i < dim; ++i) {
    if (partial.is_assigned(i)) {
      base += static_cast<std::size_t>(partial.value(i)) * domain_->stride(i);
    } else {
      free_vars.push_back(i);
    }
  }
  std::vector<int> digits(free_vars.size(), 0);
  std::size_t index = base;
  double total = 0.0;
  while (true) {
    total += probs_[index];
    // Odometer over the free variables, last one fastest.
    std::size_t k = free_vars.size();
    while (k > 0) {
      const std::size_t var = free_vars[k - 1];
      const std::size_t stride = domain_->stride(var);
      if (++digits[k - 1] < domain_->categories(var)) {
        index += stride;
        break;
      }
      index -= stride * static_cast<std::size_t>(digits[k - 1] - 1);
      digits[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
  }
  return total;
}

std::shared_ptr<const std::vector<double>> TabularJoint::table_for(std::uint64_t mask) const {
  {
    std::shared_lock lock(cache_->mutex);
    auto it = cache_->tables.find(mask);
    if (it != cache_->tables.end()) return it->second;
  }
  const std::size_t dim = domain_->dimension();
  // Row-major strides of the projection onto the assigned variables.
  std::vector<std::size_t> projected(dim, 0);
  std::size_t size = 1;
  for (std::size_t i = dim; i-- > 0;) {
    if (mask & (std::uint64_t{1} << i)) {
      projected[i] = size;
      size *= static_cast<std::size_t>(domain_->categories(i));
    }
  }
  auto table = std::make_shared<std::vector<double>>(size, 0.0);
  std::vector<int> digits(dim, 0);
  std::size_t out = 0;
  for (std::size_t state = 0; state < probs_.size(); ++state) {
    (*table)[out] += probs_[state];
    for (std::size_t k = dim; k-- > 0;) {
      if (++digits[k] < domain_->categories(k)) {
        out += projected[k];
        break;
      }
      out -= projected[k] * static_cast<std::size_t>(digits[k] - 1);
      digits[k] = 0;
    }
  }
  std::unique_lock lock(cache_->mutex);
  if (cache_->cached_entries + size > kCacheBudget) {
    cache_->tables.clear();
    cache_->cached_entries = 0;
  }
  auto [it, inserted] = cache_->tables.emplace(mask, std::move(table));
  if (inserted) cache_->cached_entries += size;
  return it->second;
}

double TabularJoint::marginal(const MaskedSample& partial) const {
  check_compatible(partial);
  const std::size_t dim = domain_->dimension();
  if (partial.assigned_count() == 0) return 1.0;
  if (partial.is_complete()) return probs_[partial.state_index()];
  std::size_t completions = 1;
  for (std::size_t i = 0; i < dim && completions <= kDirectEnumerationLimit; ++i) {
    if (!partial.is_assigned(i)) completions *= static_cast<std::size_t>(domain_->categories(i));
  }
  if (completions <= kDirectEnumerationLimit) return enumerate_completions(partial);

  const std::uint64_t mask = partial.assigned_mask();
  const auto table = table_for(mask);
  std::size_t index = 0;
  std::size_t stride = 1;
  for (std::size_t i = dim; i-- > 0;) {
    if (mask & (std::uint64_t{1} << i)) {
      index += static_cast<std::size_t>(partial.value(i)) * stride;
      stride *= static_cast<std::size_t>(domain_->categories(i));
    }
  }
  return (*table)[index];
}

Categorical TabularJoint::conditional(const MaskedSample& partial, std::size_t position) const {
  check_compatible(partial);
  if (position >= domain_->dimension() || partial.is_assigned(position)) {
    throw ContractViolation("conditional: position must be an unassigned variable");
  }
  const int d = domain_->categories(position);
  std::vector<double> masses(static_cast<std::size_t>(d));
  MaskedSample extended = partial;
  double total = 0.0;
  for (int v = 0; v < d; ++v) {
    extended.assign(position, v);
    masses[static_cast<std::size_t>(v)] = marginal(extended);
    total += masses[static_cast<std::size_t>(v)];
  }
  if (!(total > 0.0)) {
    throw GuidanceError(GuidanceErrorKind::kUnreachablePrefix,
                        "prefix has zero marginal probability");
  }
  for (double& m : masses) m /= total;
  return Categorical(std::move(masses));
}

double TabularJoint::loglik(const MaskedSample& sample, const GenerationOrder& order) const {
  check_compatible(sample);
  if (!sample.is_complete()) throw ContractViolation("loglik: sample is not fully assigned");
  if (order.size() != domain_->dimension()) throw ContractViolation("loglik: order length mismatch");
  MaskedSample prefix(domain_);
  double total = 0.0;
  for (std::size_t t = 0; t < order.size(); ++t) {
    const std::size_t pos = order[t];
    const double p = conditional(prefix, pos)[static_cast<std::size_t>(sample.value(pos))];
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    total += std::log(p);
    prefix.assign(pos, sample.value(pos));
  }
  return total;
}

MaskedSample TabularJoint::sample(double u) const {
  double cumulative = 0.0;
  std::size_t chosen = 0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (probs_[i] <= 0.0) continue;
    chosen = i;
    cumulative += probs_[i];
    if (u < cumulative) break;
  }
  return MaskedSample::from_state_index(domain_, chosen);
}

TabularJoint fit_tabular(DomainPtr domain, std::span<const MaskedSample> dataset,
                         double smoothing) {
  if (!(smoothing >= 0.0)) throw ContractViolation("fit_tabular: smoothing must be >= 0");
  if (dataset.empty() && smoothing == 0.0) {
    throw ContractViolation("fit_tabular: empty dataset with zero smoothing");
  }
  std::vector<double> counts(domain->state_count(), smoothing);
  for (const MaskedSample& s : dataset) {
    if (!(s.domain() == *domain)) throw ContractViolation("fit_tabular: mixed domains");
    counts[s.state_index()] += 1.0;
  }
  const double total = static_cast<double>(dataset.size()) +
                       smoothing * static_cast<double>(counts.size());
  for (double& c : counts) c /= total;
  return TabularJoint(std::move(domain), std::move(counts));
}

TabularJoint perturb(const TabularJoint& joint, double temperature, double uniform_mix) {
  if (!(temperature > 0.0)) throw ContractViolation("perturb: temperature must be > 0");
  if (!(uniform_mix >= 0.0 && uniform_mix <= 1.0)) {
    throw ContractViolation("perturb: uniform_mix must lie in [0, 1]");
  }
  const auto source = joint.probs();
  std::vector<double> out(source.size());
  double z = 0.0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    out[i] = temperature == 1.0 ? source[i] : std::pow(source[i], 1.0 / temperature);
    z += out[i];
  }
  const double uniform = 1.0 / static_cast<double>(out.size());
  double total = 0.0;
  for (double& p : out) {
    p = (1.0 - uniform_mix) * p / z + uniform_mix * uniform;
    total += p;
  }
  for (double& p : out) p /= total;
  return TabularJoint(joint.domain(), std::move(out));
}

TabularJoint random_joint(DomainPtr domain, double concentration, SplitMix64& rng) {
  if (!(concentration > 0.0)) throw ContractViolation("random_joint: concentration must be > 0");
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> probs(domain->state_count());
  double total = 0.0;
  for (double& p : probs) {
    p = gamma(rng);
    total += p;
  }
  if (!(total > 0.0)) {
    probs.assign(probs.size(), 1.0);
    total = static_cast<double>(probs.size());
  }
  for (double& p : probs) p /= total;
  return TabularJoint(std::move(domain), std::move(probs));
}

nlohmann::json to_json(const TabularJoint& joint) {
  nlohmann::json doc;
  doc["categories"] = std::vector<int>(joint.domain()->all_categories().begin(),
                                       joint.domain()->all_categories().end());
  doc["probs"] = std::vector<double>(joint.probs().begin(), joint.probs().end());
  return doc;
}

TabularJoint tabular_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("categories") || !doc.contains("probs")) {
    throw ContractViolation("tabular joint JSON needs \"categories\" and \"probs\"");
  }
  auto categories = doc.at("categories").get<std::vector<int>>();
  auto probs = doc.at("probs").get<std::vector<double>>();
  return TabularJoint(make_domain(std::move(categories)), std::move(probs));
}

}  // namespace gardm
