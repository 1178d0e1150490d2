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

#include "gardm/smc.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "gardm/weights.hpp"

namespace gardm {
namespace {

void check_run(const ConditionalModel& model, const GenerationOrder& order,
               const SmcOptions& options) {
  if (options.particles < 1) throw ContractViolation("smc: need at least one particle");
  if (!(options.ess_threshold > 0.0 && options.ess_threshold <= 1.0)) {
    throw ContractViolation("smc: ess_threshold must lie in (0, 1]");
  }
  if (order.size() != model.domain()->dimension()) {
    throw ContractViolation("smc: order length does not match model dimension");
  }
}

template <typename T>
void permute(std::vector<T>& items, std::span<const std::size_t> ancestors) {
  std::vector<T> next;
  next.reserve(ancestors.size());
  for (std::size_t a : ancestors) next.push_back(items[a]);
  items = std::move(next);
}

// Returns true if resampling happened.
bool maybe_resample(ParticleSet& ps, const SmcOptions& options, const RngStreams& streams,
                    std::size_t step, SmcDiagnostics& diag,
                    std::vector<std::size_t>* ancestors_out) {
  const double ess = effective_sample_size(ps.weights);
  diag.ess_trace.push_back(ess);
  if (!(ess < options.ess_threshold * static_cast<double>(ps.size()))) return false;
  const auto ancestors =
      systematic_resample(ps.weights, streams.uniform(StreamPurpose::kResample, step));
  ps.resample(ancestors);
  diag.resample_events.push_back({step, ess});
  if (ancestors_out) *ancestors_out = ancestors;
  return true;
}

void notify(const SmcObserver& observer, std::size_t step, SmcPhase phase,
            const ParticleSet& ps) {
  if (observer) observer(SmcStepView{step, phase, ps});
}

SmcResult finish(ParticleSet& ps, SmcDiagnostics diag, const SmcOptions& options,
                 const RngStreams& streams) {
  diag.final_weights = ps.weights;
  diag.selected = select_final(ps.weights, streams.uniform(StreamPurpose::kSelect));
  SmcResult result{ps.particles[diag.selected], std::move(diag), {}};
  if (options.keep_all_particles) result.particles = ps.particles;
  return result;
}

}  // namespace

ParticleSet ParticleSet::initial(const DomainPtr& domain, std::size_t count) {
  ParticleSet ps;
  ps.particles.assign(count, MaskedSample(domain));
  ps.weights.assign(count, 1.0 / static_cast<double>(count));
  ps.prev_log_w.assign(count, 0.0);
  return ps;
}

void ParticleSet::resample(std::span<const std::size_t> ancestors) {
  if (ancestors.size() != size()) throw ContractViolation("resample: ancestor count mismatch");
  permute(particles, ancestors);
  permute(prev_log_w, ancestors);
  weights.assign(size(), 1.0 / static_cast<double>(size()));
}

nlohmann::json to_json(const SmcDiagnostics& d) {
  nlohmann::json events = nlohmann::json::array();
  for (const ResampleEvent& e : d.resample_events) {
    events.push_back({{"step", e.step}, {"ess", e.ess}});
  }
  return {{"particles", d.particles},
          {"ess_threshold", d.ess_threshold},
          {"ess_trace", d.ess_trace},
          {"resample_events", std::move(events)},
          {"counters",
           {{"model_evals", d.counters.model_evals},
            {"disc_evals", d.counters.disc_evals},
            {"total", d.counters.total()}}},
          {"final_weights", d.final_weights},
          {"selected", d.selected}};
}

std::size_t select_final(std::span<const double> weights, double u) {
  return Categorical(std::vector<double>(weights.begin(), weights.end())).sample(u);
}

SmcResult bsdg_sample(const ConditionalModel& model, const Discriminator& disc,
                      const GenerationOrder& order, const SmcOptions& options,
                      const RngStreams& streams, const SmcObserver& observer) {
  check_run(model, order, options);
  const std::size_t n = options.particles;
  ParticleSet ps = ParticleSet::initial(model.domain(), n);
  SmcDiagnostics diag;
  diag.particles = n;
  diag.ess_threshold = options.ess_threshold;
  std::vector<double> log_tilde(n);
  try {
    for (std::size_t t = 1; t <= order.size(); ++t) {
      if (maybe_resample(ps, options, streams, t, diag, nullptr)) {
        notify(observer, t, SmcPhase::kResampled, ps);
      }
      const std::size_t pos = order[t - 1];
      for (std::size_t i = 0; i < n; ++i) {
        MaskedSample& x = ps.particles[i];
        const Categorical cond = model.conditional(x, pos);
        ++diag.counters.model_evals;
        x.assign(pos, static_cast<int>(
                          cond.sample(streams.uniform(StreamPurpose::kPropagate, t, i))));
        const double log_w = clamp_logit(disc.logit(x));
        ++diag.counters.disc_evals;
        log_tilde[i] = std::log(ps.weights[i]) + log_w - ps.prev_log_w[i];
        ps.prev_log_w[i] = log_w;
      }
      ps.step = t;
      notify(observer, t, SmcPhase::kPropagated, ps);
      ps.weights = normalize_weights(log_tilde);
      notify(observer, t, SmcPhase::kWeighted, ps);
    }
  } catch (const GuidanceError& e) {
    throw SmcFailure(e, std::move(diag));
  }
  return finish(ps, std::move(diag), options, streams);
}

Lookahead fadg_lookahead(const ConditionalModel& model, const Discriminator& disc,
                         const ParticleSet& particles, std::size_t position) {
  const std::size_t n = particles.size();
  Lookahead la;
  la.steps.reserve(n);
  la.log_c.resize(n);
  std::vector<double> log_tilde(n);
  for (std::size_t i = 0; i < n; ++i) {
    la.steps.push_back(guided_step(model, disc, particles.particles[i], position));
    la.evals += la.steps.back().evals;
    la.log_c[i] = la.steps.back().log_normalizer - particles.prev_log_w[i];
    log_tilde[i] = std::log(particles.weights[i]) + la.log_c[i];
  }
  try {
    la.weights = normalize_weights(log_tilde);
  } catch (const GuidanceError&) {
    throw GuidanceError(GuidanceErrorKind::kAnnihilatedSupport,
                        "look-ahead constant is zero for every particle");
  }
  return la;
}

void fadg_propagate(ParticleSet& particles, const Lookahead& lookahead,
                    const RngStreams& streams) {
  const std::size_t t = particles.step + 1;
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const StepDistribution& step = lookahead.steps[i];
    const std::size_t v =
        step.corrected.sample(streams.uniform(StreamPurpose::kPropagate, t, i));
    particles.particles[i].assign(step.position, static_cast<int>(v));
    particles.prev_log_w[i] = step.log_w[v];
  }
  particles.step = t;
}

SmcResult fadg_sample(const ConditionalModel& model, const Discriminator& disc,
                      const GenerationOrder& order, const SmcOptions& options,
                      const RngStreams& streams, const SmcObserver& observer) {
  check_run(model, order, options);
  const std::size_t n = options.particles;
  ParticleSet ps = ParticleSet::initial(model.domain(), n);
  SmcDiagnostics diag;
  diag.particles = n;
  diag.ess_threshold = options.ess_threshold;
  try {
    for (std::size_t t = 1; t <= order.size(); ++t) {
      Lookahead la = fadg_lookahead(model, disc, ps, order[t - 1]);
      diag.counters += la.evals;
      ps.weights = la.weights;
      notify(observer, t, SmcPhase::kWeighted, ps);
      std::vector<std::size_t> ancestors;
      if (maybe_resample(ps, options, streams, t, diag, &ancestors)) {
        permute(la.steps, ancestors);
        permute(la.log_c, ancestors);
        notify(observer, t, SmcPhase::kResampled, ps);
      }
      fadg_propagate(ps, la, streams);
      notify(observer, t, SmcPhase::kPropagated, ps);
    }
  } catch (const GuidanceError& e) {
    throw SmcFailure(e, std::move(diag));
  }
  return finish(ps, std::move(diag), options, streams);
}

}  // namespace gardm
