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

#include <stdexcept>
#include <string>

namespace gardm {

// Thrown when a caller breaks an operation's precondition (shape mismatch,
// out-of-range value, unnormalized weights, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class GuidanceErrorKind {
  kDegenerateParticles,
  kUnreachablePrefix,
  kSupportViolation,
  kAnnihilatedSupport,
};

const char* to_string(GuidanceErrorKind kind);

// Runtime failure of the guided-sampling machinery itself.
class GuidanceError : public std::runtime_error {
 public:
  GuidanceError(GuidanceErrorKind kind, const std::string& detail);

  GuidanceErrorKind kind() const noexcept { return kind_; }

 private:
  GuidanceErrorKind kind_;
};

}  // namespace gardm
