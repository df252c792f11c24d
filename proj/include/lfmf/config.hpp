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

// Run configuration: a JSON document with a mandatory "model" section and
// optional "assembly", "grid", "simulate", "converge", "probe" sections.
// Parsing is strict: unknown keys and non-finite numbers are rejected.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lfmf/assembly.hpp"
#include "lfmf/model.hpp"

namespace lfmf {

struct RunConfig {
  ModelParams model;
  AssemblyOptions assembly;
  int steps = 2400;

  struct Simulate {
    int agents = 100;
    int runs = 200;
    std::uint64_t seed = 1;
  } simulate;

  struct Converge {
    std::vector<int> n_values{5, 10, 20, 40, 80};
    int runs_per_n = 100;
  } converge;

  struct Probe {
    int directions = 50;
    double step = 0.05;
    int runs = 64;
    int pieces = 12;
  } probe;

  std::string output_dir = "out";
};

// Throws ConfigError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

}  // namespace lfmf
