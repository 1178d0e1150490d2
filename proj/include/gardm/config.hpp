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

// Experiment description (one JSON document) and the construction of the
// (p_data, p_theta, discriminator) problem it describes.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gardm/discriminator.hpp"
#include "gardm/graphs.hpp"
#include "gardm/tabular_joint.hpp"
#include "json.hpp"

namespace gardm {

enum class Method { kArdm, kArdg, kBsdg, kFadg };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);
bool is_smc(Method method) noexcept;

enum class DomainKind { kSequence, kGraph };

struct DomainSpec {
  DomainKind kind = DomainKind::kSequence;
  std::vector<int> categories;  // sequence domains
  int node_categories = kDefaultNodeCategories;
  int edge_categories = kDefaultEdgeCategories;

  bool operator==(const DomainSpec&) const = default;
};

enum class DataSource { kUniform, kRandom, kTable, kFit, kValidityRejection };

struct DataSpec {
  // Defaults to kRandom for sequences and kValidityRejection for graphs.
  std::optional<DataSource> source;
  // kTable: inline {"categories", "probs"} document, or a file in `path`.
  nlohmann::json table;
  // kTable file, or kFit JSON-lines sample file.
  std::string path;
  double smoothing = 1.0;
  double concentration = 1.0;
  // kValidityRejection: node count -> weight of the generating distribution.
  std::map<std::size_t, double> node_count_weights{{2, 0.25}, {3, 0.35}, {4, 0.25}, {5, 0.15}};
  std::size_t dataset_size = 20000;

  bool operator==(const DataSpec&) const = default;
};

struct PerturbationSpec {
  double temperature = 2.0;
  double uniform_mix = 0.2;
  // Optional explicit p_theta table (sequence domains), replacing the
  // perturbation of p_data.
  nlohmann::json table;

  bool operator==(const PerturbationSpec&) const = default;
};

enum class DiscriminatorKind { kOptimal, kCorrupt, kConstant };

struct DiscriminatorSpec {
  DiscriminatorKind kind = DiscriminatorKind::kOptimal;
  double epsilon = 0.0;
  AttenuationSchedule schedule = AttenuationSchedule::kFinalStepExact;
  double logit = 0.0;

  bool operator==(const DiscriminatorSpec&) const = default;
};

struct RunConfig {
  DomainSpec domain;
  DataSpec p_data;
  PerturbationSpec perturbation;
  DiscriminatorSpec discriminator;
  std::vector<Method> methods{Method::kArdm, Method::kArdg, Method::kBsdg, Method::kFadg};
  std::vector<OrderKind> orders{OrderKind::kUniform};
  std::size_t particles = 10;
  double ess_threshold = 0.7;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  bool keep_all_particles = false;
  std::string output_dir;

  bool operator==(const RunConfig&) const = default;
};

// Validation failure; `pointer` is the JSON pointer of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string pointer, const std::string& message)
      : std::runtime_error(pointer + ": " + message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const RunConfig& config);

// 1-based line of the config text that holds the field named by `pointer`
// (its last key), or 1 if it cannot be located.
std::size_t locate_line(std::string_view text, std::string_view pointer);

// One fixed dimension of the problem.
struct DimensionCase {
  std::size_t nodes = 0;  // 0 for sequence domains
  std::optional<GraphLayout> layout;
  DomainPtr domain;
  JointPtr p_data;
  JointPtr p_theta;
  DiscriminatorPtr discriminator;
};

struct Problem {
  bool is_graph = false;
  std::vector<DimensionCase> cases;
  // p(D) over cases.
  std::vector<double> case_probs;
};

// Relative paths in the config resolve against `base_dir`.
Problem build_problem(const RunConfig& config, const std::filesystem::path& base_dir = {});

DiscriminatorPtr build_discriminator(const DiscriminatorSpec& spec, JointPtr p_data,
                                     JointPtr p_theta);

}  // namespace gardm
