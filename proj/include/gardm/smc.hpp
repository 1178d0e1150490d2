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

// Sequential Monte Carlo discriminator guidance: a bootstrap filter that
// proposes from the model and weights by the W ratio, and a fully adapted
// filter that proposes from the guided conditional with look-ahead
// resampling.
//
// Both filters track the unnormalized targets gamma_t = W_t * p_theta over
// length-t prefixes of one generation order shared by all particles.
// Resampling is systematic and triggered when ESS < ess_threshold * N.
// Randomness is keyed: propagation of particle i at step t uses
// (kPropagate, t, i), resampling at step t uses (kResample, t) and the final
// selection uses (kSelect), so N = 1 runs replay the single-trajectory
// samplers draw for draw.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gardm/core.hpp"
#include "gardm/discriminator.hpp"
#include "gardm/error.hpp"
#include "gardm/rng.hpp"
#include "gardm/samplers.hpp"
#include "gardm/tabular_joint.hpp"
#include "json.hpp"

namespace gardm {

inline constexpr std::size_t kDefaultParticles = 10;
inline constexpr double kDefaultEssThreshold = 0.7;

struct SmcOptions {
  std::size_t particles = kDefaultParticles;
  double ess_threshold = kDefaultEssThreshold;
  // Return every final particle with its weight, not just the selected one.
  bool keep_all_particles = false;
};

struct ParticleSet {
  std::vector<MaskedSample> particles;
  // Normalized.
  std::vector<double> weights;
  // Clamped logit of each particle's current prefix; 0 at step 0.
  std::vector<double> prev_log_w;
  std::size_t step = 0;

  static ParticleSet initial(const DomainPtr& domain, std::size_t count);

  std::size_t size() const noexcept { return particles.size(); }

  // Keeps particles[ancestors[k]] at slot k and resets weights to 1/N.
  void resample(std::span<const std::size_t> ancestors);
};

struct ResampleEvent {
  std::size_t step = 0;
  double ess = 0.0;
};

struct SmcDiagnostics {
  std::size_t particles = 0;
  double ess_threshold = 0.0;
  // ESS checked against the threshold at each step.
  std::vector<double> ess_trace;
  std::vector<ResampleEvent> resample_events;
  EvalCounters counters;
  std::vector<double> final_weights;
  std::size_t selected = 0;
};

nlohmann::json to_json(const SmcDiagnostics& diagnostics);

class SmcFailure : public GuidanceError {
 public:
  SmcFailure(const GuidanceError& cause, SmcDiagnostics diagnostics)
      : GuidanceError(cause), diagnostics_(std::move(diagnostics)) {}
  const SmcDiagnostics& diagnostics() const noexcept { return diagnostics_; }

 private:
  SmcDiagnostics diagnostics_;
};

struct SmcResult {
  MaskedSample sample;
  SmcDiagnostics diagnostics;
  // Filled when SmcOptions::keep_all_particles; weights in
  // diagnostics.final_weights.
  std::vector<MaskedSample> particles;
};

enum class SmcPhase {
  kWeighted,    // weights updated for step t
  kResampled,   // resampling just happened at step t
  kPropagated,  // x_sigma(t) drawn for every particle
};

struct SmcStepView {
  std::size_t step;
  SmcPhase phase;
  const ParticleSet& particles;
};

using SmcObserver = std::function<void(const SmcStepView&)>;

SmcResult bsdg_sample(const ConditionalModel& model, const Discriminator& disc,
                      const GenerationOrder& order, const SmcOptions& options,
                      const RngStreams& streams, const SmcObserver& observer = {});

struct Lookahead {
  // Guided step per particle; reused as the proposal.
  std::vector<StepDistribution> steps;
  // log C_{t-1}^i = log sum_v [W_t(prefix + v) / W_{t-1}(prefix)] p_theta(v | prefix).
  std::vector<double> log_c;
  std::vector<double> weights;
  EvalCounters evals;
};

// Look-ahead weights w_{t-1}^i * C_{t-1}^i for the next variable `position`.
// Throws GuidanceError(kAnnihilatedSupport) if C = 0 for every particle.
Lookahead fadg_lookahead(const ConditionalModel& model, const Discriminator& disc,
                         const ParticleSet& particles, std::size_t position);

// Draws x_sigma(t) for every particle from its cached guided step. Weights
// are untouched.
void fadg_propagate(ParticleSet& particles, const Lookahead& lookahead,
                    const RngStreams& streams);

SmcResult fadg_sample(const ConditionalModel& model, const Discriminator& disc,
                      const GenerationOrder& order, const SmcOptions& options,
                      const RngStreams& streams, const SmcObserver& observer = {});

// Index k drawn with probability weights[k].
std::size_t select_final(std::span<const double> weights, double u);

}  // namespace gardm
