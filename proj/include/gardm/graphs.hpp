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

// Toy undirected-graph domain: node and edge variables, node-count
// distributions, node/edge generation orders and a validity grammar.
//
// Variables 0..n-1 are node types; variables n..D-1 are the edges (i, j),
// i < j, in lexicographic order. Edge category 0 means "no edge".
//
// Validity is an artifact-defined stand-in for chemical valency:
//   isolated-B    every node of type 1 has at least one edge;
//   disconnected  nodes with at least one edge form a single component.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gardm/core.hpp"
#include "gardm/rng.hpp"
#include "json.hpp"

namespace gardm {

inline constexpr int kDefaultNodeCategories = 2;
inline constexpr int kDefaultEdgeCategories = 2;

// n + n(n-1)/2. Throws ContractViolation for n = 0.
std::size_t graph_dimension(std::size_t nodes);

class GraphLayout {
 public:
  GraphLayout(std::size_t nodes, int node_categories = kDefaultNodeCategories,
              int edge_categories = kDefaultEdgeCategories);

  std::size_t nodes() const noexcept { return nodes_; }
  std::size_t dimension() const noexcept { return graph_dimension(nodes_); }
  int node_categories() const noexcept { return node_categories_; }
  int edge_categories() const noexcept { return edge_categories_; }
  const DomainPtr& domain() const noexcept { return domain_; }

  bool is_node_var(std::size_t var) const noexcept { return var < nodes_; }
  // Variable index of edge {a, b}, a != b, in either argument order.
  std::size_t edge_var(std::size_t a, std::size_t b) const;
  // Endpoints (i, j), i < j, of an edge variable.
  std::pair<std::size_t, std::size_t> edge_endpoints(std::size_t var) const;

 private:
  std::size_t nodes_;
  int node_categories_;
  int edge_categories_;
  DomainPtr domain_;
  std::vector<std::pair<std::size_t, std::size_t>> endpoints_;
};

class DimensionDistribution {
 public:
  DimensionDistribution(std::vector<std::size_t> support, std::vector<double> probs);

  static DimensionDistribution point_mass(std::size_t nodes);
  // Empirical frequencies; support sorted ascending.
  static DimensionDistribution from_node_counts(std::span<const std::size_t> counts);

  std::span<const std::size_t> support() const noexcept { return support_; }
  std::span<const double> probs() const noexcept { return probs_; }
  double probability(std::size_t nodes) const;

  std::size_t sample(SplitMix64& rng) const;

 private:
  std::vector<std::size_t> support_;
  std::vector<double> probs_;
};

// (n, D) with n drawn from the distribution.
std::pair<std::size_t, std::size_t> sample_dimension(const DimensionDistribution& dist,
                                                     SplitMix64& rng);

enum class OrderKind { kUniform, kNsEs, kNEsN };

std::string_view to_string(OrderKind kind);
std::optional<OrderKind> parse_order_kind(std::string_view name);

GenerationOrder sample_order(const GraphLayout& layout, OrderKind kind, SplitMix64& rng);

struct ValidityReport {
  bool valid = true;
  std::vector<std::string> reasons;
};

ValidityReport graph_validity(const MaskedSample& sample, const GraphLayout& layout);

// Every variable uniform over its categories.
MaskedSample random_graph(const GraphLayout& layout, SplitMix64& rng);

// Rejection sampling from the uniform distribution conditioned on validity.
MaskedSample sample_valid_graph(const GraphLayout& layout, SplitMix64& rng);

// {"n": ..., "node_types": [...], "edges": [[i, j, category], ...]}, listing
// non-zero edges only.
nlohmann::json graph_to_json(const MaskedSample& sample, const GraphLayout& layout);
MaskedSample graph_from_json(const nlohmann::json& doc, const GraphLayout& layout);

}  // namespace gardm
