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

// Independent reference implementations for the test suites. Nothing here
// calls into the library's marginalization, conditioning or validity code.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <vector>

#include "gardm/core.hpp"
#include "gardm/discriminator.hpp"
#include "gardm/graphs.hpp"
#include "gardm/tabular_joint.hpp"

namespace oracle {

// Digits of state index i, variable 0 most significant.
inline std::vector<int> decode(std::size_t i, const std::vector<int>& cats) {
  std::vector<int> x(cats.size());
  for (std::size_t k = cats.size(); k-- > 0;) {
    x[k] = static_cast<int>(i % static_cast<std::size_t>(cats[k]));
    i /= static_cast<std::size_t>(cats[k]);
  }
  return x;
}

inline std::size_t state_count(const std::vector<int>& cats) {
  std::size_t n = 1;
  for (int c : cats) n *= static_cast<std::size_t>(c);
  return n;
}

// Sum of p over every full state agreeing with `partial` (-1 = free).
inline double marginal(const std::vector<double>& p, const std::vector<int>& cats,
                       const std::vector<int>& partial) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto x = decode(i, cats);
    bool match = true;
    for (std::size_t k = 0; k < x.size() && match; ++k) {
      match = partial[k] < 0 || partial[k] == x[k];
    }
    if (match) total += p[i];
  }
  return total;
}

inline std::vector<double> conditional(const std::vector<double>& p,
                                       const std::vector<int>& cats, std::vector<int> partial,
                                       std::size_t pos) {
  std::vector<double> out(static_cast<std::size_t>(cats[pos]));
  double z = 0.0;
  for (int v = 0; v < cats[pos]; ++v) {
    partial[pos] = v;
    out[static_cast<std::size_t>(v)] = marginal(p, cats, partial);
    z += out[static_cast<std::size_t>(v)];
  }
  for (double& o : out) o = z > 0 ? o / z : 0.0;
  return out;
}

inline std::vector<int> values_of(const gardm::MaskedSample& s) {
  return {s.values().begin(), s.values().end()};
}

inline std::vector<double> probs_of(const gardm::TabularJoint& j) {
  return {j.probs().begin(), j.probs().end()};
}

inline std::vector<int> cats_of(const gardm::Domain& d) {
  return {d.all_categories().begin(), d.all_categories().end()};
}

// Every partial assignment of the domain, as value vectors with -1 holes.
inline std::vector<std::vector<int>> all_partials(const std::vector<int>& cats) {
  std::vector<std::vector<int>> out{{}};
  for (int c : cats) {
    std::vector<std::vector<int>> next;
    for (const auto& prefix : out) {
      for (int v = -1; v < c; ++v) {
        auto e = prefix;
        e.push_back(v);
        next.push_back(std::move(e));
      }
    }
    out = std::move(next);
  }
  return out;
}

// Validity via adjacency closure (Floyd-Warshall reachability).
inline bool graph_valid(const std::vector<int>& x, std::size_t n) {
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  std::vector<int> degree(n, 0);
  std::size_t idx = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++idx) {
      if (x[idx] != 0) {
        reach[i][j] = reach[j][i] = true;
        ++degree[i];
        ++degree[j];
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 1 && degree[i] == 0) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (degree[i] > 0 && degree[j] > 0 && !reach[i][j]) return false;
    }
  }
  return true;
}

// Model wrapper counting conditional() calls.
class CountingModel final : public gardm::ConditionalModel {
 public:
  explicit CountingModel(const gardm::ConditionalModel& base) : base_(base) {}
  const gardm::DomainPtr& domain() const override { return base_.domain(); }
  gardm::Categorical conditional(const gardm::MaskedSample& partial,
                                 std::size_t position) const override {
    ++calls;
    return base_.conditional(partial, position);
  }
  mutable std::atomic<std::uint64_t> calls{0};

 private:
  const gardm::ConditionalModel& base_;
};

class CountingDiscriminator final : public gardm::Discriminator {
 public:
  explicit CountingDiscriminator(const gardm::Discriminator& base) : base_(base) {}
  double logit(const gardm::MaskedSample& partial) const override {
    ++calls;
    return base_.logit(partial);
  }
  mutable std::atomic<std::uint64_t> calls{0};

 private:
  const gardm::Discriminator& base_;
};

// Random strictly positive table from a splitmix generator.
inline std::vector<double> random_table(std::size_t states, gardm::SplitMix64& rng,
                                        double floor = 0.05) {
  std::vector<double> p(states);
  double z = 0.0;
  for (double& v : p) {
    v = floor + rng.uniform01();
    z += v;
  }
  for (double& v : p) v /= z;
  return p;
}

// log p(x) = log of the full-state probability, directly.
inline double log_prob(const std::vector<double>& p, std::size_t index) {
  return std::log(p[index]);
}

}  // namespace oracle
