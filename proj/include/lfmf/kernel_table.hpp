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

// Raw kernel function table. Kept free of Eigen and the standard containers
// so the ISA-specific translation units include nothing else inline.

#pragma once

#include <cstddef>

namespace lfmf::kernels {

enum class Isa { kScalar, kAvx2 };

// Raw kernel table. Matrices are row-major; blocks are rows x agents.
struct KernelTable {
  Isa isa;
  // out = m * in + bias
  void (*affine_map)(const double* m, const double* bias, int rows_out,
                     int rows_in, const double* in, double* out,
                     std::size_t agents);
  // out += scale * (m * in)
  void (*accumulate_product)(const double* m, double scale, int rows_out,
                             int rows_in, const double* in, double* out,
                             std::size_t agents);
  // acc[i] += weight * (in_i - center)' w (in_i - center)
  void (*accumulate_quadratic)(const double* w, const double* center, int rows,
                               const double* in, double weight, double* acc,
                               std::size_t agents);
  // sums[r] = sum over agents of in[r][i], in a fixed 4-lane order
  void (*row_sums)(const double* in, int rows, double* sums, std::size_t agents);
  // out[j] += a * in[j] for j < count
  void (*axpy)(double a, const double* in, double* out, std::size_t count);
};

const KernelTable& scalar_table();
// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();

}  // namespace lfmf::kernels
