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
#include <limits>

namespace gardm {

// SplitMix64. Small, fast and fully specified, so every stream is
// reproducible across standard libraries (unlike std::uniform_*_distribution).
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n) by rejection; n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;

 private:
  std::uint64_t state_;
};

// Purposes for keyed substreams. Values are part of the reproducibility
// contract; never renumber.
enum class StreamPurpose : std::uint64_t {
  kPropagate = 1,
  kResample = 2,
  kSelect = 3,
  kOrder = 4,
  kDimension = 5,
  kDataset = 6,
  kPrefix = 7,
  kBootstrap = 8,
  kTable = 9,
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

// Derives independent substreams from one root seed, keyed by
// (purpose, step, index).
class RngStreams {
 public:
  explicit constexpr RngStreams(std::uint64_t root_seed) noexcept : root_(root_seed) {}

  std::uint64_t root() const noexcept { return root_; }

  SplitMix64 stream(StreamPurpose purpose, std::uint64_t step = 0,
                    std::uint64_t index = 0) const noexcept;

  // First uniform of the keyed stream.
  double uniform(StreamPurpose purpose, std::uint64_t step = 0,
                 std::uint64_t index = 0) const noexcept {
    return stream(purpose, step, index).uniform01();
  }

 private:
  std::uint64_t root_;
};

}  // namespace gardm
