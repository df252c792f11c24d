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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"
#include "lfmf/errors.hpp"
#include "lfmf/kernels.hpp"

namespace lfmf::kernels {

#ifndef LFMF_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

const KernelTable* pick_default() {
  const char* env = std::getenv("MF_STACKELBERG_KERNELS");
  if (env != nullptr && std::string(env) == "scalar") return &scalar_table();
  if (avx2_table() != nullptr && cpu_has_avx2()) return avx2_table();
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{pick_default()};
  return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void select(Isa isa) {
  if (isa == Isa::kScalar) {
    current().store(&scalar_table());
    return;
  }
  if (avx2_table() == nullptr || !cpu_has_avx2()) {
    throw std::runtime_error("AVX2 kernels unavailable on this build or CPU");
  }
  current().store(avx2_table());
}

std::string_view isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

void affine_map(const RowMajorMatrix& m, std::span<const double> bias,
                const AgentBlock& in, AgentBlock& out) {
  if (m.cols() != in.rows() || m.rows() != out.rows() ||
      in.agents() != out.agents() ||
      (!bias.empty() && static_cast<Eigen::Index>(bias.size()) != m.rows())) {
    throw DimensionError("affine_map: shape mismatch");
  }
  active().affine_map(m.data(), bias.empty() ? nullptr : bias.data(),
                      static_cast<int>(m.rows()), static_cast<int>(m.cols()),
                      in.data().data(), out.data().data(), in.agents());
}

void accumulate_product(const RowMajorMatrix& m, double scale,
                        const AgentBlock& in, AgentBlock& out) {
  if (m.cols() != in.rows() || m.rows() != out.rows() ||
      in.agents() != out.agents()) {
    throw DimensionError("accumulate_product: shape mismatch");
  }
  active().accumulate_product(m.data(), scale, static_cast<int>(m.rows()),
                              static_cast<int>(m.cols()), in.data().data(),
                              out.data().data(), in.agents());
}

void accumulate_quadratic(const RowMajorMatrix& w, std::span<const double> center,
                          const AgentBlock& in, double weight,
                          std::span<double> acc) {
  if (w.rows() != w.cols() || w.rows() != in.rows() ||
      static_cast<Eigen::Index>(center.size()) != w.rows() ||
      acc.size() != in.agents()) {
    throw DimensionError("accumulate_quadratic: shape mismatch");
  }
  active().accumulate_quadratic(w.data(), center.data(),
                                static_cast<int>(w.rows()), in.data().data(),
                                weight, acc.data(), in.agents());
}

void row_sums(const AgentBlock& in, std::span<double> sums) {
  if (static_cast<int>(sums.size()) != in.rows()) {
    throw DimensionError("row_sums: shape mismatch");
  }
  active().row_sums(in.data().data(), in.rows(), sums.data(), in.agents());
}

void axpy(double a, const AgentBlock& in, AgentBlock& out) {
  if (in.rows() != out.rows() || in.agents() != out.agents()) {
    throw DimensionError("axpy: shape mismatch");
  }
  active().axpy(a, in.data().data(), out.data().data(), in.data().size());
}

}  // namespace lfmf::kernels
