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

#include "gardm/rng.hpp"

namespace gardm {

std::uint64_t SplitMix64::uniform_index(std::uint64_t n) noexcept {
  // Largest multiple of n that fits, to keep the draw unbiased.
  const std::uint64_t limit = max() - (max() % n + 1) % n;
  std::uint64_t x = (*this)();
  while (x > limit) x = (*this)();
  return x % n;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
  SplitMix64 g(a ^ (b * 0xd1b54a32d192ed03ULL + 0x8bb84b93962eacc9ULL));
  g();
  return g();
}

SplitMix64 RngStreams::stream(StreamPurpose purpose, std::uint64_t step,
                              std::uint64_t index) const noexcept {
  std::uint64_t s = mix_seed(root_, static_cast<std::uint64_t>(purpose));
  s = mix_seed(s, step);
  s = mix_seed(s, index);
  return SplitMix64(s);
}

}  // namespace gardm
