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

// Compiled with -mavx2. Mirrors kernels_scalar.cpp operation for operation:
// separate multiply and add (no FMA) so results match bit for bit.

#include <immintrin.h>

#include "kernels_internal.hpp"

namespace lfmf::kernels {

namespace {

void affine_map_avx2(const double* m, const double* bias, int rows_out,
                     int rows_in, const double* in, double* out,
                     std::size_t agents) {
  const std::size_t blocked = agents - agents % kLanes;
  for (int r = 0; r < rows_out; ++r) {
    double* dst = out + static_cast<std::size_t>(r) * agents;
    const double b = bias ? bias[r] : 0.0;
    const __m256d vb = _mm256_set1_pd(b);
    for (std::size_t i = 0; i < blocked; i += kLanes) _mm256_storeu_pd(dst + i, vb);
    for (std::size_t i = blocked; i < agents; ++i) dst[i] = b;
    for (int c = 0; c < rows_in; ++c) {
      const double coef = m[r * rows_in + c];
      const __m256d vc = _mm256_set1_pd(coef);
      const double* src = in + static_cast<std::size_t>(c) * agents;
      for (std::size_t i = 0; i < blocked; i += kLanes) {
        const __m256d prod = _mm256_mul_pd(vc, _mm256_loadu_pd(src + i));
        _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), prod));
      }
      for (std::size_t i = blocked; i < agents; ++i) dst[i] = dst[i] + coef * src[i];
    }
  }
}

void accumulate_product_avx2(const double* m, double scale, int rows_out,
                             int rows_in, const double* in, double* out,
                             std::size_t agents) {
  const std::size_t blocked = agents - agents % kLanes;
  for (int r = 0; r < rows_out; ++r) {
    double* dst = out + static_cast<std::size_t>(r) * agents;
    for (int c = 0; c < rows_in; ++c) {
      const double coef = scale * m[r * rows_in + c];
      const __m256d vc = _mm256_set1_pd(coef);
      const double* src = in + static_cast<std::size_t>(c) * agents;
      for (std::size_t i = 0; i < blocked; i += kLanes) {
        const __m256d prod = _mm256_mul_pd(vc, _mm256_loadu_pd(src + i));
        _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), prod));
      }
      for (std::size_t i = blocked; i < agents; ++i) dst[i] = dst[i] + coef * src[i];
    }
  }
}

void accumulate_quadratic_avx2(const double* w, const double* center, int rows,
                               const double* in, double weight, double* acc,
                               std::size_t agents) {
  const std::size_t blocked = agents - agents % kLanes;
  const __m256d vweight = _mm256_set1_pd(weight);
  for (std::size_t i = 0; i < blocked; i += kLanes) {
    __m256d q = _mm256_setzero_pd();
    for (int r = 0; r < rows; ++r) {
      const __m256d dr = _mm256_sub_pd(
          _mm256_loadu_pd(in + static_cast<std::size_t>(r) * agents + i),
          _mm256_set1_pd(center[r]));
      __m256d wd = _mm256_setzero_pd();
      for (int c = 0; c < rows; ++c) {
        const __m256d dc = _mm256_sub_pd(
            _mm256_loadu_pd(in + static_cast<std::size_t>(c) * agents + i),
            _mm256_set1_pd(center[c]));
        wd = _mm256_add_pd(wd, _mm256_mul_pd(_mm256_set1_pd(w[r * rows + c]), dc));
      }
      q = _mm256_add_pd(q, _mm256_mul_pd(dr, wd));
    }
    const __m256d cur = _mm256_loadu_pd(acc + i);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(cur, _mm256_mul_pd(vweight, q)));
  }
  for (std::size_t i = blocked; i < agents; ++i) {
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

void row_sums_avx2(const double* in, int rows, double* sums,
                   std::size_t agents) {
  const std::size_t blocked = agents - agents % kLanes;
  for (int r = 0; r < rows; ++r) {
    const double* src = in + static_cast<std::size_t>(r) * agents;
    __m256d vsum = _mm256_setzero_pd();
    for (std::size_t i = 0; i < blocked; i += kLanes) {
      vsum = _mm256_add_pd(vsum, _mm256_loadu_pd(src + i));
    }
    alignas(32) double lane[kLanes];
    _mm256_store_pd(lane, vsum);
    double s = combine_lanes(lane);
    for (std::size_t i = blocked; i < agents; ++i) s = s + src[i];
    sums[r] = s;
  }
}

void axpy_avx2(double a, const double* in, double* out, std::size_t count) {
  const std::size_t blocked = count - count % kLanes;
  const __m256d va = _mm256_set1_pd(a);
  for (std::size_t j = 0; j < blocked; j += kLanes) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(in + j));
    _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j), prod));
  }
  for (std::size_t j = blocked; j < count; ++j) out[j] = out[j] + a * in[j];
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{Isa::kAvx2, affine_map_avx2,
                                 accumulate_product_avx2,
                                 accumulate_quadratic_avx2, row_sums_avx2,
                                 axpy_avx2};
  return &table;
}

}  // namespace lfmf::kernels
