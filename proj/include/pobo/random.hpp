//
// Copyright 2026 The pobo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace pobo {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed of a named substream. Projection matrices, oracle noise and objective
// draws each get their own (tag, index) so no two of them share a generator.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_tag,
                                 std::uint64_t index = 0) {
  std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (stream_tag + 0x9e3779b97f4a7c15ULL));
  return mix64(h ^ (index + 0x9e3779b97f4a7c15ULL));
}

// Stream tags used across the toolkit.
inline constexpr std::uint64_t kProjectionStream = 0x70726f6a;
inline constexpr std::uint64_t kOracleStream = 0x6f72636c;
inline constexpr std::uint64_t kObjectiveStream = 0x6f626a66;
inline constexpr std::uint64_t kFitStream = 0x66697473;

// Gaussian stream with an explicit Box-Muller rule on top of mt19937_64.
// std::normal_distribution leaves its algorithm to the implementation, which
// would break the bit-reproducibility contract of the released transform;
// the engine's output sequence and this transform are both pinned.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double next_uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; stays away from 0 so log() below is finite.
  double next_uniform_pos() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform_pos();
    const double u2 = next_uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = mag * std::sin(ang);
    have_spare_ = true;
    return mag * std::cos(ang);
  }

  // Uniform integer in [0, bound); bound must be positive. The modulo bias is
  // below 2^-53 for every bound used here (subsample picks, shuffles).
  std::uint64_t next_index(std::uint64_t bound) { return engine_() % bound; }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pobo
