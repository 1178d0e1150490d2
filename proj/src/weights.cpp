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

#include "gardm/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gardm/error.hpp"

namespace gardm {
namespace {

void require_normalized(std::span<const double> weights, const char* op) {
  if (weights.empty()) throw ContractViolation(std::string(op) + ": empty weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ContractViolation(std::string(op) + ": negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw ContractViolation(std::string(op) + ": weights sum to " + std::to_string(total));
  }
}

}  // namespace

double clamp_logit(double logit) {
  if (std::isnan(logit)) throw ContractViolation("logit is NaN");
  return std::clamp(logit, -kLogitClamp, kLogitClamp);
}

double log_sum_exp(std::span<const double> log_values) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : log_values) peak = std::max(peak, v);
  if (!std::isfinite(peak)) return peak;
  double acc = 0.0;
  for (double v : log_values) acc += std::exp(v - peak);
  return peak + std::log(acc);
}

std::vector<double> normalize_weights(std::span<const double> log_weights) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : log_weights) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw ContractViolation("normalize_weights: NaN or +inf log weight");
    }
    peak = std::max(peak, v);
  }
  if (!std::isfinite(peak)) {
    throw GuidanceError(GuidanceErrorKind::kDegenerateParticles,
                        "all log weights are -inf");
  }
  std::vector<double> out(log_weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(log_weights[i] - peak);
    total += out[i];
  }
  for (double& w : out) w /= total;
  return out;
}

double effective_sample_size(std::span<const double> weights) {
  require_normalized(weights, "effective_sample_size");
  double sum_sq = 0.0;
  for (double w : weights) sum_sq += w * w;
  const double n = static_cast<double>(weights.size());
  return std::clamp(1.0 / sum_sq, 1.0, n);
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, double u) {
  require_normalized(weights, "systematic_resample");
  if (!(u >= 0.0 && u < 1.0)) {
    throw ContractViolation("systematic_resample: u outside [0, 1)");
  }
  const std::size_t n = weights.size();
  const double scale = static_cast<double>(n);
  std::vector<std::size_t> ancestors;
  ancestors.reserve(n);
  // Grid point k sits at u + k on the scaled cumulative axis [0, N).
  double cumulative = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n && k < n; ++i) {
    cumulative += weights[i] * scale;
    const double upper = (i + 1 == n && weights[i] > 0.0) ? scale : cumulative;
    while (k < n && u + static_cast<double>(k) < upper) {
      ancestors.push_back(i);
      ++k;
    }
  }
  // Rounding can leave the last grid points unassigned; they belong to the
  // last particle with positive weight.
  if (k < n) {
    std::size_t last = n - 1;
    while (last > 0 && weights[last] <= 0.0) --last;
    ancestors.resize(n, last);
  }
  return ancestors;
}

}  // namespace gardm
