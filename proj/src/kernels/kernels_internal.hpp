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

#pragma once

#include <cstddef>

#include "lfmf/kernel_table.hpp"

namespace lfmf::kernels {

// Width of one AVX2 double register; the scalar reference reduces in the
// same lane layout.
inline constexpr std::size_t kLanes = 4;

inline double combine_lanes(const double* lane) {
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

}  // namespace lfmf::kernels
