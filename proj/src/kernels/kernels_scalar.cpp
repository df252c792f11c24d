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

#include "kernels_internal.hpp"

namespace lfmf::kernels {

namespace {

void affine_map_scalar(const double* m, const double* bias, int rows_out,
                       int rows_in, const double* in, double* out,
                       std::size_t agents) {
  for (int r = 0; r < rows_out; ++r) {
    double* dst = out + static_cast<std::size_t>(r) * agents;
    const double b = bias ? bias[r] : 0.0;
    for (std::size_t i = 0; i < agents; ++i) dst[i] = b;
    for (int c = 0; c < rows_in; ++c) {
      const double coef = m[r * rows_in + c];
      const double* src = in + static_cast<std::size_t>(c) * agents;
      for (std::size_t i = 0; i < agents; ++i) dst[i] = dst[i] + coef * src[i];
    }
  }
}

void accumulate_product_scalar(const double* m, double scale, int rows_out,
                               int rows_in, const double* in, double* out,
                               std::size_t agents) {
  for (int r = 0; r < rows_out; ++r) {
    double* dst = out + static_cast<std::size_t>(r) * agents;
    for (int c = 0; c < rows_in; ++c) {
      const double coef = scale * m[r * rows_in + c];
      const double* src = in + static_cast<std::size_t>(c) * agents;
      for (std::size_t i = 0; i < agents; ++i) dst[i] = dst[i] + coef * src[i];
    }
  }
}

void accumulate_quadratic_scalar(const double* w, const double* center,
                                 int rows, const double* in, double weight,
                                 double* acc, std::size_t agents) {
  for (std::size_t i = 0; i < agents; ++i) {
    double q = 0.0;
    for (int r = 0; r < rows; ++r) {
      const double dr = in[static_cast<std::size_t>(r) * agents + i] - center[r];
      double wd = 0.0;
      for (int c = 0; c < rows; ++c) {
        const double dc = in[static_cast<std::size_t>(c) * agents + i] - center[c];
        wd = wd + w[r * rows + c] * dc;
      }
      q = q + dr * wd;
    }
    acc[i] = acc[i] + weight * q;
  }
}

void row_sums_scalar(const double* in, int rows, double* sums,
                     std::size_t agents) {
  const std::size_t blocked = agents - agents % kLanes;
  for (int r = 0; r < rows; ++r) {
    const double* src = in + static_cast<std::size_t>(r) * agents;
    double lane[kLanes] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < blocked; i += kLanes) {
      for (std::size_t j = 0; j < kLanes; ++j) lane[j] = lane[j] + src[i + j];
    }
    double s = combine_lanes(lane);
    for (std::size_t i = blocked; i < agents; ++i) s = s + src[i];
    sums[r] = s;
  }
}

void axpy_scalar(double a, const double* in, double* out, std::size_t count) {
  for (std::size_t j = 0; j < count; ++j) out[j] = out[j] + a * in[j];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::kScalar, affine_map_scalar,
                                 accumulate_product_scalar,
                                 accumulate_quadratic_scalar, row_sums_scalar,
                                 axpy_scalar};
  return table;
}

}  // namespace lfmf::kernels
