// Copyright 2026 The lfmf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Counter-based Gaussian streams. Every draw is a pure function of
// (seed, run, agent, step, purpose), so a path can be regenerated without
// replaying any other path, and agent i sees the same noise for every
// population size.

#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace lfmf {

// Philox4x32 with 10 rounds.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

enum class NoisePurpose : std::uint32_t {
  kIncrement = 0,
  kInitial = 1,
  kDirection = 2,
};

class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint32_t run);

  // Fills out with independent standard normals. Agent 0 is the common
  // (leader) noise; followers are 1..N.
  void normals(NoisePurpose purpose, std::uint32_t agent, std::uint32_t step,
               std::span<double> out) const;

  std::uint64_t seed() const { return seed_; }
  std::uint32_t run() const { return run_; }

 private:
  std::uint64_t seed_;
  std::uint32_t run_;
  std::array<std::uint32_t, 2> key_;
};

}  // namespace lfmf
