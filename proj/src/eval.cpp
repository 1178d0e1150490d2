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

#include "gardm/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <utility>

#include "gardm/error.hpp"
#include "gardm/smc.hpp"

namespace gardm {

Histogram empirical_distribution(std::span<const MaskedSample> samples) {
  if (samples.empty()) throw ContractViolation("empirical_distribution: no samples");
  Histogram h{samples.front().domain_ptr(), {}, samples.size()};
  if (h.domain->state_count() > kDefaultStateLimit) {
    throw ContractViolation("empirical_distribution: state space exceeds the tabular limit");
  }
  h.freq.assign(h.domain->state_count(), 0.0);
  const double unit = 1.0 / static_cast<double>(samples.size());
  for (const MaskedSample& s : samples) {
    if (!(s.domain() == *h.domain)) {
      throw ContractViolation("empirical_distribution: mixed dimensions or categories");
    }
    h.freq[s.state_index()] += unit;
  }
  return h;
}

double tv_distance(const Histogram& hist, const TabularJoint& joint) {
  if (!hist.domain || !(*hist.domain == *joint.domain()) ||
      hist.freq.size() != joint.state_count()) {
    throw ContractViolation("tv_distance: histogram and joint live on different spaces");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < hist.freq.size(); ++i) {
    total += std::abs(hist.freq[i] - joint.probs()[i]);
  }
  return std::min(1.0, 0.5 * total);
}

double tv_noise_band(const TabularJoint& joint, std::size_t samples) {
  if (samples == 0) throw ContractViolation("tv_noise_band: need samples > 0");
  double total = 0.0;
  for (double p : joint.probs()) total += std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return 1.5 * total;
}

EvalCounters expected_counters(Method method, std::size_t dimension, std::size_t category_sum,
                               std::size_t particles) {
  const auto d = static_cast<std::uint64_t>(dimension);
  const auto s = static_cast<std::uint64_t>(category_sum);
  const auto n = static_cast<std::uint64_t>(particles);
  switch (method) {
    case Method::kArdm:
      return {d, 0};
    case Method::kArdg:
      return {d, s};
    case Method::kBsdg:
      return {n * d, n * d};
    case Method::kFadg:
      return {n * d, n * s};
  }
  return {};
}

bool RunReport::all_ok() const {
  return std::all_of(cells.begin(), cells.end(), [](const CellReport& c) { return c.ok; });
}

const CellReport* RunReport::find(Method method, OrderKind order) const {
  for (const CellReport& c : cells) {
    if (c.method == method && c.order == order) return &c;
  }
  return nullptr;
}

std::uint64_t sample_seed(std::uint64_t root, OrderKind order, std::size_t m) {
  return mix_seed(mix_seed(root, 0x6f72646572ULL + static_cast<std::uint64_t>(order)),
                  static_cast<std::uint64_t>(m));
}

GeneratedSample generate_one(const Problem& problem, Method method, OrderKind order_kind,
                             std::size_t particles, double ess_threshold, bool keep_all,
                             std::uint64_t seed) {
  if (problem.cases.empty()) throw ContractViolation("generate_one: empty problem");
  const RngStreams streams(seed);
  std::size_t case_index = 0;
  if (problem.cases.size() > 1) {
    case_index = Categorical(problem.case_probs).sample(streams.uniform(StreamPurpose::kDimension));
  }
  const DimensionCase& pc = problem.cases[case_index];
  SplitMix64 order_rng = streams.stream(StreamPurpose::kOrder);
  GenerationOrder order = pc.layout ? sample_order(*pc.layout, order_kind, order_rng)
                                    : uniform_order(pc.domain->dimension(), order_rng);
  GeneratedSample out{case_index, order, MaskedSample(pc.domain), {}, std::nullopt, {}, {}};
  switch (method) {
    case Method::kArdm: {
      SampleResult r = ardm_sample(*pc.p_theta, order, streams);
      out.sample = std::move(r.sample);
      out.counters = r.counters;
      break;
    }
    case Method::kArdg: {
      SampleResult r = ardg_sample(*pc.p_theta, *pc.discriminator, order, streams);
      out.sample = std::move(r.sample);
      out.counters = r.counters;
      break;
    }
    case Method::kBsdg:
    case Method::kFadg: {
      const SmcOptions options{particles, ess_threshold, keep_all};
      SmcResult r = method == Method::kBsdg
                        ? bsdg_sample(*pc.p_theta, *pc.discriminator, order, options, streams)
                        : fadg_sample(*pc.p_theta, *pc.discriminator, order, options, streams);
      out.sample = std::move(r.sample);
      out.counters = r.diagnostics.counters;
      if (keep_all) {
        out.particles = std::move(r.particles);
        out.particle_weights = r.diagnostics.final_weights;
      }
      out.diagnostics = std::move(r.diagnostics);
      break;
    }
  }
  return out;
}

namespace {

struct WeightedPoint {
  std::size_t case_index;
  std::size_t state;
  double weight;
  bool valid;
};

std::uint64_t point_key(std::size_t case_index, std::size_t state) {
  return (static_cast<std::uint64_t>(case_index) << 40) | static_cast<std::uint64_t>(state);
}

double mixture_tv(const Problem& problem, const std::unordered_map<std::uint64_t, double>& mass) {
  double observed_abs = 0.0;
  double observed_target = 0.0;
  for (const auto& [key, h] : mass) {
    const auto c = static_cast<std::size_t>(key >> 40);
    const auto state = static_cast<std::size_t>(key & ((std::uint64_t{1} << 40) - 1));
    const double q = problem.case_probs[c] * problem.cases[c].p_data->probs()[state];
    observed_abs += std::abs(h - q);
    observed_target += q;
  }
  return std::clamp(0.5 * (observed_abs + std::max(0.0, 1.0 - observed_target)), 0.0, 1.0);
}

constexpr std::size_t kBootstrapRounds = 100;

// Points grouped per generated sample; each group's weights sum to 1.
void compute_metrics(const Problem& problem, const std::vector<std::vector<WeightedPoint>>& groups,
                     const std::vector<std::uint64_t>& selected_keys, std::uint64_t seed,
                     CellReport& cell) {
  const std::size_t m = groups.size();
  const double unit = 1.0 / static_cast<double>(m);
  auto accumulate = [&](auto&& index_of) {
    std::unordered_map<std::uint64_t, double> mass;
    for (std::size_t k = 0; k < m; ++k) {
      for (const WeightedPoint& p : groups[index_of(k)]) {
        mass[point_key(p.case_index, p.state)] += p.weight * unit;
      }
    }
    return mass;
  };
  const double tv = mixture_tv(problem, accumulate([](std::size_t k) { return k; }));
  SplitMix64 rng = RngStreams(seed).stream(StreamPurpose::kBootstrap);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t b = 0; b < kBootstrapRounds; ++b) {
    std::vector<std::size_t> picks(m);
    for (auto& p : picks) p = static_cast<std::size_t>(rng.uniform_index(m));
    const double v = mixture_tv(problem, accumulate([&](std::size_t k) { return picks[k]; }));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / kBootstrapRounds;
  const double var = std::max(0.0, sum_sq / kBootstrapRounds - mean * mean);
  cell.metrics["tv"] = Metric{tv, std::sqrt(var), m};

  if (problem.is_graph) {
    double valid = 0.0;
    for (const auto& g : groups) {
      for (const WeightedPoint& p : g) valid += p.valid ? p.weight : 0.0;
    }
    const double frac = valid * unit;
    cell.metrics["validity"] =
        Metric{frac, std::sqrt(frac * (1.0 - frac) / static_cast<double>(m)), m};
  }
  const std::set<std::uint64_t> distinct(selected_keys.begin(), selected_keys.end());
  const double uniq = static_cast<double>(distinct.size()) * unit;
  cell.metrics["uniqueness"] =
      Metric{uniq, std::sqrt(uniq * (1.0 - uniq) / static_cast<double>(m)), m};
}

std::string counters_mismatch(Method method, const GeneratedSample& g, const DimensionCase& pc,
                              std::size_t particles) {
  std::size_t category_sum = 0;
  for (int d : pc.domain->all_categories()) category_sum += static_cast<std::size_t>(d);
  const EvalCounters want =
      expected_counters(method, pc.domain->dimension(), category_sum, particles);
  const bool skips_allowed = method == Method::kArdg || method == Method::kFadg;
  const bool ok = g.counters.model_evals == want.model_evals &&
                  (skips_allowed ? g.counters.disc_evals <= want.disc_evals
                                 : g.counters.disc_evals == want.disc_evals);
  if (ok) return {};
  std::ostringstream msg;
  msg << "evaluation counters (" << g.counters.model_evals << ", " << g.counters.disc_evals
      << ") differ from the closed form (" << want.model_evals << ", " << want.disc_evals << ")";
  return msg.str();
}

CellReport run_cell(const RunConfig& config, const Problem& problem, Method method,
                    OrderKind order, std::size_t threads) {
  const auto start = std::chrono::steady_clock::now();
  CellReport cell;
  cell.method = method;
  cell.order = order;
  cell.particles = is_smc(method) ? config.particles : 1;
  cell.seed = config.seed;
  const std::size_t m = config.samples;

  std::vector<std::optional<GeneratedSample>> results(m);
  std::vector<std::string> errors(m);
  std::vector<nlohmann::json> failures(m);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t k = first; k < m; k += stride) {
      try {
        results[k] = generate_one(problem, method, order, cell.particles, config.ess_threshold,
                                  config.keep_all_particles, sample_seed(config.seed, order, k));
      } catch (const SmcFailure& e) {
        errors[k] = e.what();
        failures[k] = to_json(e.diagnostics());
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  threads = std::max<std::size_t>(1, std::min(threads, std::max<std::size_t>(m, 1)));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w, threads);
  }

  for (std::size_t k = 0; k < m; ++k) {
    if (!errors[k].empty()) {
      cell.ok = false;
      cell.error = "sample " + std::to_string(k) + ": " + errors[k];
      cell.failure_diagnostics = failures[k];
      break;
    }
    const GeneratedSample& g = *results[k];
    cell.counters += g.counters;
    const std::string mismatch =
        counters_mismatch(method, g, problem.cases[g.case_index], cell.particles);
    if (!mismatch.empty() && cell.ok) {
      cell.ok = false;
      cell.error = "sample " + std::to_string(k) + ": " + mismatch;
    }
  }
  if (cell.ok && m > 0) {
    std::vector<std::vector<WeightedPoint>> groups(m);
    std::vector<std::uint64_t> selected(m);
    double ess_sum = 0.0;
    double ess_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      const GeneratedSample& g = *results[k];
      const DimensionCase& pc = problem.cases[g.case_index];
      auto point = [&](const MaskedSample& s, double w) {
        const bool valid = pc.layout ? graph_validity(s, *pc.layout).valid : true;
        return WeightedPoint{g.case_index, s.state_index(), w, valid};
      };
      if (!g.particles.empty()) {
        for (std::size_t i = 0; i < g.particles.size(); ++i) {
          groups[k].push_back(point(g.particles[i], g.particle_weights[i]));
        }
      } else {
        groups[k].push_back(point(g.sample, 1.0));
      }
      selected[k] = point_key(g.case_index, g.sample.state_index());
      if (g.diagnostics) {
        for (double e : g.diagnostics->ess_trace) {
          ess_sum += e;
          ess_min = std::min(ess_min, e);
          ++cell.ess.steps;
        }
        cell.ess.resample_events += g.diagnostics->resample_events.size();
      }
    }
    if (cell.ess.steps > 0) {
      cell.ess.mean = ess_sum / static_cast<double>(cell.ess.steps);
      cell.ess.min = ess_min;
    }
    compute_metrics(problem, groups, selected,
                    mix_seed(config.seed, static_cast<std::uint64_t>(order)), cell);
  }
  cell.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return cell;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunReport run_experiment(const RunConfig& config, const Problem& problem, std::size_t threads) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.config = config;
  for (OrderKind order : config.orders) {
    for (Method method : config.methods) {
      report.cells.push_back(run_cell(config, problem, method, order, threads));
    }
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

nlohmann::json to_json(const RunReport& report, bool include_wall_clock) {
  nlohmann::json cells = nlohmann::json::array();
  for (const CellReport& c : report.cells) {
    nlohmann::json metrics = nlohmann::json::object();
    for (const auto& [name, m] : c.metrics) {
      metrics[name] = {{"value", m.value}, {"stderr", m.stderr_}, {"samples", m.samples}};
    }
    nlohmann::json cell = {
        {"method", to_string(c.method)},
        {"order", to_string(c.order)},
        {"particles", c.particles},
        {"seed", c.seed},
        {"status", c.ok ? "ok" : "failed"},
        {"metrics", std::move(metrics)},
        {"counters",
         {{"model_evals", c.counters.model_evals},
          {"disc_evals", c.counters.disc_evals},
          {"total", c.counters.total()}}},
    };
    if (is_smc(c.method)) {
      cell["ess"] = {{"mean", c.ess.mean},
                     {"min", c.ess.min},
                     {"resample_events", c.ess.resample_events},
                     {"steps", c.ess.steps}};
    }
    if (!c.ok) {
      cell["error"] = c.error;
      if (!c.failure_diagnostics.is_null()) cell["diagnostics"] = c.failure_diagnostics;
    }
    if (include_wall_clock) cell["wall_clock_seconds"] = c.wall_clock_seconds;
    cells.push_back(std::move(cell));
  }
  nlohmann::json doc = {{"config", to_json(report.config)},
                        {"seed", report.config.seed},
                        {"samples", report.config.samples},
                        {"cells", std::move(cells)}};
  if (include_wall_clock) doc["wall_clock_seconds"] = report.wall_clock_seconds;
  return doc;
}

std::string to_csv(const RunReport& report) {
  std::ostringstream out;
  out << "method,order,N,metric,value,samples,seed\n";
  for (const CellReport& c : report.cells) {
    auto row = [&](const std::string& metric, const std::string& value, std::size_t samples) {
      out << to_string(c.method) << ',' << to_string(c.order) << ',' << c.particles << ','
          << metric << ',' << value << ',' << samples << ',' << c.seed << '\n';
    };
    if (!c.ok) {
      row("failed", "1", report.config.samples);
      continue;
    }
    for (const auto& [name, m] : c.metrics) {
      row(name, format_number(m.value), m.samples);
      row(name + "_stderr", format_number(m.stderr_), m.samples);
    }
    row("model_evals", std::to_string(c.counters.model_evals), report.config.samples);
    row("disc_evals", std::to_string(c.counters.disc_evals), report.config.samples);
    if (is_smc(c.method)) {
      row("mean_ess", format_number(c.ess.mean), report.config.samples);
      row("resample_events", std::to_string(c.ess.resample_events), report.config.samples);
    }
  }
  return out.str();
}

}  // namespace gardm
