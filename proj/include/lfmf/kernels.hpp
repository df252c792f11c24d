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

// Batched small affine maps over a population of agents.
//
// Agent states are stored structure-of-arrays: an AgentBlock with R rows and
// N agents keeps component r of every agent contiguous, so a fixed R x C
// matrix applied to all N agents vectorizes across agents. Two variants of
// every kernel exist (portable scalar reference and AVX2); the active one is
// chosen once at runtime. Both variants perform the same floating-point
// operations in the same order, so their results are bitwise identical.

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lfmf/errors.hpp"
#include "lfmf/kernel_table.hpp"

namespace lfmf {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class AgentBlock {
 public:
  AgentBlock() = default;
  AgentBlock(int rows, std::size_t agents)
      : rows_(rows), agents_(agents),
        data_(static_cast<std::size_t>(rows) * agents, 0.0) {}

  int rows() const { return rows_; }
  std::size_t agents() const { return agents_; }

  double* row(int r) { return data_.data() + static_cast<std::size_t>(r) * agents_; }
  const double* row(int r) const {
    return data_.data() + static_cast<std::size_t>(r) * agents_;
  }
  double& at(int r, std::size_t i) { return row(r)[i]; }
  double at(int r, std::size_t i) const { return row(r)[i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

 private:
  int rows_ = 0;
  std::size_t agents_ = 0;
  std::vector<double> data_;
};

namespace kernels {

bool cpu_has_avx2();

// Kernel table in use. Defaults to AVX2 when compiled and supported by the
// CPU; MF_STACKELBERG_KERNELS=scalar forces the reference variant.
const KernelTable& active();
void select(Isa isa);
std::string_view isa_name(Isa isa);

// Typed front-ends that dispatch through active().
void affine_map(const RowMajorMatrix& m, std::span<const double> bias,
                const AgentBlock& in, AgentBlock& out);
void accumulate_product(const RowMajorMatrix& m, double scale,
                        const AgentBlock& in, AgentBlock& out);
void accumulate_quadratic(const RowMajorMatrix& w, std::span<const double> center,
                          const AgentBlock& in, double weight,
                          std::span<double> acc);
void row_sums(const AgentBlock& in, std::span<double> sums);
void axpy(double a, const AgentBlock& in, AgentBlock& out);

}  // namespace kernels
}  // namespace lfmf
