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

#include "gardm/error.hpp"

namespace gardm {

const char* to_string(GuidanceErrorKind kind) {
  switch (kind) {
    case GuidanceErrorKind::kDegenerateParticles:
      return "degenerate particle system";
    case GuidanceErrorKind::kUnreachablePrefix:
      return "unreachable prefix";
    case GuidanceErrorKind::kSupportViolation:
      return "support violation";
    case GuidanceErrorKind::kAnnihilatedSupport:
      return "guidance annihilated support";
  }
  return "unknown guidance error";
}

GuidanceError::GuidanceError(GuidanceErrorKind kind, const std::string& detail)
    : std::runtime_error(detail.empty()
                             ? std::string(to_string(kind))
                             : std::string(to_string(kind)) + ": " + detail),
      kind_(kind) {}

}  // namespace gardm
