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

// Sample-quality metrics and the experiment runner that produces one report
// cell per (method, order kind).

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gardm/config.hpp"
#include "gardm/core.hpp"
#include "gardm/samplers.hpp"
#include "gardm/smc.hpp"
#include "gardm/tabular_joint.hpp"
#include "json.hpp"

namespace gardm {

struct Histogram {
  DomainPtr domain;
  // Normalized frequencies, row-major over the product space.
  std::vector<double> freq;
  std::size_t samples = 0;
};

// Throws ContractViolation on an empty input or mixed domains.
Histogram empirical_distribution(std::span<const MaskedSample> samples);

// Half the L1 distance between the histogram and the joint.
double tv_distance(const Histogram& hist, const TabularJoint& joint);

// Upper 3-sigma band on the TV distance between a size-M empirical sample
// and its source: 1.5 * sum_x sqrt(p(1-p)/M).
double tv_noise_band(const TabularJoint& joint, std::size_t samples);

// Closed-form evaluation counts for one sample of dimension D with
// per-step category counts d_sigma(t) summing to `category_sum`.
EvalCounters expected_counters(Method method, std::size_t dimension, std::size_t category_sum,
                               std::size_t particles);

struct Metric {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
};

struct EssSummary {
  double mean = 0.0;
  double min = 0.0;
  std::size_t resample_events = 0;
  std::size_t steps = 0;
};

struct CellReport {
  Method method = Method::kArdm;
  OrderKind order = OrderKind::kUniform;
  std::size_t particles = 1;
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  nlohmann::json failure_diagnostics;
  std::map<std::string, Metric> metrics;
  EvalCounters counters;
  EssSummary ess;
  double wall_clock_seconds = 0.0;
};

struct RunReport {
  RunConfig config;
  std::vector<CellReport> cells;
  double wall_clock_seconds = 0.0;

  bool all_ok() const;
  const CellReport* find(Method method, OrderKind order) const;
};

// Seed of sample m in cells of the given order kind; shared by all methods
// so that matched cells see the same (D, sigma) and random streams.
std::uint64_t sample_seed(std::uint64_t root, OrderKind order, std::size_t m);

struct GeneratedSample {
  std::size_t case_index = 0;
  GenerationOrder order = GenerationOrder::identity(0);
  MaskedSample sample;
  EvalCounters counters;
  std::optional<SmcDiagnostics> diagnostics;
  // keep_all_particles: every final particle with its weight.
  std::vector<MaskedSample> particles;
  std::vector<double> particle_weights;
};

// Draws (D, sigma) and then one sample with `method`, all from `seed`.
GeneratedSample generate_one(const Problem& problem, Method method, OrderKind order,
                             std::size_t particles, double ess_threshold, bool keep_all,
                             std::uint64_t seed);

RunReport run_experiment(const RunConfig& config, const Problem& problem,
                         std::size_t threads = 1);

nlohmann::json to_json(const RunReport& report, bool include_wall_clock = true);

// One row per (cell, metric): method,order,N,metric,value,samples,seed.
std::string to_csv(const RunReport& report);

}  // namespace gardm
