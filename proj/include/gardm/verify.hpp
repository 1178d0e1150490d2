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

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gardm/config.hpp"
#include "gardm/tabular_joint.hpp"

namespace gardm {

// Enumeration cap on the number of partial assignments, prod(1 + d_i).
inline constexpr std::size_t kOracleStateCap = std::size_t{1} << 20;

std::size_t partial_state_count(const Domain& domain) noexcept;

class OracleCapExceeded : public std::runtime_error {
 public:
  OracleCapExceeded(std::size_t states, std::size_t cap);
  std::size_t states() const noexcept { return states_; }

 private:
  std::size_t states_;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
  std::string render() const;  // one "[PASS] name: detail" line per check
};

inline constexpr double kVerifyTolerance = 1e-9;

// Exhaustive checks for one (p_data, p_theta) pair with the optimal discriminator.
VerifyReport verify_pair(const JointPtr& p_data, const JointPtr& p_theta, std::uint64_t seed,
                         std::size_t reduction_runs = 20);

// Runs verify_pair for every dimension case; throws OracleCapExceeded up front.
VerifyReport verify_problem(const Problem& problem, std::uint64_t seed);

}  // namespace gardm
