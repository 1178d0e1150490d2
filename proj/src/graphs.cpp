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

#include "gardm/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "gardm/error.hpp"

namespace gardm {

std::size_t graph_dimension(std::size_t nodes) {
  if (nodes == 0) throw ContractViolation("graph_dimension: need at least one node");
  return nodes + nodes * (nodes - 1) / 2;
}

GraphLayout::GraphLayout(std::size_t nodes, int node_categories, int edge_categories)
    : nodes_(nodes), node_categories_(node_categories), edge_categories_(edge_categories) {
  const std::size_t dim = graph_dimension(nodes);
  if (node_categories < 1 || edge_categories < 1) {
    throw ContractViolation("graph layout: category counts must be >= 1");
  }
  std::vector<int> categories(dim, edge_categories);
  std::fill_n(categories.begin(), nodes, node_categories);
  domain_ = make_domain(std::move(categories));
  endpoints_.reserve(dim - nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = i + 1; j < nodes; ++j) endpoints_.emplace_back(i, j);
  }
}

std::size_t GraphLayout::edge_var(std::size_t a, std::size_t b) const {
  if (a == b || a >= nodes_ || b >= nodes_) {
    throw ContractViolation("graph layout: invalid edge endpoints");
  }
  const std::size_t i = std::min(a, b);
  const std::size_t j = std::max(a, b);
  // Edges of rows 0..i-1 precede row i.
  const std::size_t before = i * nodes_ - i * (i + 1) / 2;
  return nodes_ + before + (j - i - 1);
}

std::pair<std::size_t, std::size_t> GraphLayout::edge_endpoints(std::size_t var) const {
  if (var < nodes_ || var >= dimension()) {
    throw ContractViolation("graph layout: not an edge variable");
  }
  return endpoints_[var - nodes_];
}

DimensionDistribution::DimensionDistribution(std::vector<std::size_t> support,
                                             std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (support_.empty() || support_.size() != probs_.size()) {
    throw ContractViolation("dimension distribution: support/probs mismatch or empty");
  }
  for (std::size_t n : support_) graph_dimension(n);
  std::vector<std::size_t> sorted = support_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ContractViolation("dimension distribution: repeated node count");
  }
  // Validates normalization.
  Categorical check(probs_);
  (void)check;
}

DimensionDistribution DimensionDistribution::point_mass(std::size_t nodes) {
  return DimensionDistribution({nodes}, {1.0});
}

DimensionDistribution DimensionDistribution::from_node_counts(
    std::span<const std::size_t> counts) {
  if (counts.empty()) throw ContractViolation("dimension distribution: no observations");
  std::map<std::size_t, std::size_t> freq;
  for (std::size_t n : counts) ++freq[n];
  std::vector<std::size_t> support;
  std::vector<double> probs;
  for (const auto& [n, c] : freq) {
    support.push_back(n);
    probs.push_back(static_cast<double>(c) / static_cast<double>(counts.size()));
  }
  return DimensionDistribution(std::move(support), std::move(probs));
}

double DimensionDistribution::probability(std::size_t nodes) const {
  for (std::size_t k = 0; k < support_.size(); ++k) {
    if (support_[k] == nodes) return probs_[k];
  }
  return 0.0;
}

std::size_t DimensionDistribution::sample(SplitMix64& rng) const {
  return support_[Categorical(probs_).sample(rng.uniform01())];
}

std::pair<std::size_t, std::size_t> sample_dimension(const DimensionDistribution& dist,
                                                     SplitMix64& rng) {
  const std::size_t n = dist.sample(rng);
  return {n, graph_dimension(n)};
}

std::string_view to_string(OrderKind kind) {
  switch (kind) {
    case OrderKind::kUniform:
      return "uniform";
    case OrderKind::kNsEs:
      return "NsEs";
    case OrderKind::kNEsN:
      return "NEsN";
  }
  return "uniform";
}

std::optional<OrderKind> parse_order_kind(std::string_view name) {
  if (name == "uniform" || name == "Uniform") return OrderKind::kUniform;
  if (name == "NsEs") return OrderKind::kNsEs;
  if (name == "NEsN") return OrderKind::kNEsN;
  return std::nullopt;
}

namespace {

void shuffle(std::vector<std::size_t>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.uniform_index(i)]);
  }
}

}  // namespace

GenerationOrder sample_order(const GraphLayout& layout, OrderKind kind, SplitMix64& rng) {
  const std::size_t n = layout.nodes();
  const std::size_t dim = layout.dimension();
  switch (kind) {
    case OrderKind::kUniform:
      return uniform_order(dim, rng);
    case OrderKind::kNsEs: {
      std::vector<std::size_t> nodes(n);
      std::iota(nodes.begin(), nodes.end(), std::size_t{0});
      std::vector<std::size_t> edges(dim - n);
      std::iota(edges.begin(), edges.end(), n);
      shuffle(nodes, rng);
      shuffle(edges, rng);
      nodes.insert(nodes.end(), edges.begin(), edges.end());
      return GenerationOrder(std::move(nodes));
    }
    case OrderKind::kNEsN: {
      std::vector<std::size_t> nodes(n);
      std::iota(nodes.begin(), nodes.end(), std::size_t{0});
      shuffle(nodes, rng);
      std::vector<std::size_t> perm;
      perm.reserve(dim);
      for (std::size_t k = 0; k < n; ++k) {
        perm.push_back(nodes[k]);
        std::vector<std::size_t> block;
        for (std::size_t j = 0; j < k; ++j) block.push_back(layout.edge_var(nodes[j], nodes[k]));
        shuffle(block, rng);
        perm.insert(perm.end(), block.begin(), block.end());
      }
      return GenerationOrder(std::move(perm));
    }
  }
  throw ContractViolation("sample_order: unknown order kind");
}

ValidityReport graph_validity(const MaskedSample& sample, const GraphLayout& layout) {
  if (!(sample.domain() == *layout.domain()) || !sample.is_complete()) {
    throw ContractViolation("graph_validity: sample must be a complete graph of this layout");
  }
  const std::size_t n = layout.nodes();
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (std::size_t var = n; var < layout.dimension(); ++var) {
    if (sample.value(var) == 0) continue;
    const auto [i, j] = layout.edge_endpoints(var);
    adjacency[i].push_back(j);
    adjacency[j].push_back(i);
  }
  ValidityReport report;
  for (std::size_t i = 0; i < n; ++i) {
    if (sample.value(i) == 1 && adjacency[i].empty()) {
      report.valid = false;
      report.reasons.emplace_back("isolated-B");
      break;
    }
  }
  // BFS from the first non-isolated node must reach every non-isolated node.
  std::vector<bool> seen(n, false);
  std::size_t start = n;
  std::size_t active = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!adjacency[i].empty()) {
      ++active;
      if (start == n) start = i;
    }
  }
  if (active > 0) {
    std::vector<std::size_t> frontier{start};
    seen[start] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
      const std::size_t u = frontier.back();
      frontier.pop_back();
      for (std::size_t v : adjacency[u]) {
        if (!seen[v]) {
          seen[v] = true;
          ++reached;
          frontier.push_back(v);
        }
      }
    }
    if (reached != active) {
      report.valid = false;
      report.reasons.emplace_back("disconnected");
    }
  }
  return report;
}

MaskedSample random_graph(const GraphLayout& layout, SplitMix64& rng) {
  MaskedSample s(layout.domain());
  for (std::size_t v = 0; v < layout.dimension(); ++v) {
    s.assign(v, static_cast<int>(rng.uniform_index(
                    static_cast<std::uint64_t>(layout.domain()->categories(v)))));
  }
  return s;
}

MaskedSample sample_valid_graph(const GraphLayout& layout, SplitMix64& rng) {
  while (true) {
    MaskedSample s = random_graph(layout, rng);
    if (graph_validity(s, layout).valid) return s;
  }
}

nlohmann::json graph_to_json(const MaskedSample& sample, const GraphLayout& layout) {
  if (!(sample.domain() == *layout.domain()) || !sample.is_complete()) {
    throw ContractViolation("graph_to_json: sample must be a complete graph of this layout");
  }
  const std::size_t n = layout.nodes();
  std::vector<int> node_types(sample.values().begin(), sample.values().begin() + n);
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t var = n; var < layout.dimension(); ++var) {
    if (sample.value(var) == 0) continue;
    const auto [i, j] = layout.edge_endpoints(var);
    edges.push_back({i, j, sample.value(var)});
  }
  return {{"n", n}, {"node_types", node_types}, {"edges", std::move(edges)}};
}

MaskedSample graph_from_json(const nlohmann::json& doc, const GraphLayout& layout) {
  if (doc.at("n").get<std::size_t>() != layout.nodes()) {
    throw ContractViolation("graph_from_json: node count does not match layout");
  }
  const auto node_types = doc.at("node_types").get<std::vector<int>>();
  if (node_types.size() != layout.nodes()) {
    throw ContractViolation("graph_from_json: node_types length mismatch");
  }
  MaskedSample s(layout.domain());
  for (std::size_t i = 0; i < node_types.size(); ++i) s.assign(i, node_types[i]);
  for (std::size_t var = layout.nodes(); var < layout.dimension(); ++var) s.assign(var, 0);
  for (const auto& e : doc.at("edges")) {
    const auto i = e.at(0).get<std::size_t>();
    const auto j = e.at(1).get<std::size_t>();
    const int c = e.at(2).get<int>();
    if (c == 0) throw ContractViolation("graph_from_json: zero-category edge listed");
    s.assign(layout.edge_var(i, j), c);
  }
  return s;
}

}  // namespace gardm
