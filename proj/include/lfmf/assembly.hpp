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

// Block form of the consistency system. The forward state stacks
// (xhat, xbar0, q, l1, l2) and the backward state stacks (y, yhat, y0, k1, k2),
// each block of size n:
//
//   dX = (A X + B Y + b) dt + D dW0
//   dY = (Ahat X + Bhat Y + bhat) dt + Z dW0,    Y(T) = G X(T) + g.

#pragma once

#include <vector>

#include "lfmf/model.hpp"
#include "lfmf/numerics.hpp"

namespace lfmf {

// Coefficient of q in the yhat row of Ahat: -(Xi1 + Q)' or -(Xi1 - Q)'.
enum class QCoupling { kSum, kDifference };

struct AssemblyOptions {
  QCoupling q_coupling = QCoupling::kSum;
};

// The linear part of a forward-backward system with forward and backward
// states of equal size.
struct FbsdeBlocks {
  Matrix forward_state;      // A
  Matrix forward_coupling;   // B
  Matrix backward_state;     // Ahat
  Matrix backward_coupling;  // Bhat
  Matrix terminal_gain;      // G

  int size() const { return static_cast<int>(forward_state.rows()); }

  // Drift matrix of (X, Y - G X).
  Matrix coupled_drift() const;
};

struct BlockSystem {
  int n = 0;
  FbsdeBlocks blocks;
  Vector forward_offset;   // b
  Matrix forward_noise;    // D, 5n x d
  Vector backward_offset;  // bhat
  Vector terminal_offset;  // g
  Matrix coupled_drift;    // drift of (X, Y - G X)
  Vector coupled_offset;   // offset of (X, Y - G X)
};

// Index of a block inside the stacked forward or backward state.
enum Block : int { kXHat = 0, kXBar0 = 1, kQ = 2, kL1 = 3, kL2 = 4 };
enum BackwardBlock : int { kY = 0, kYHat = 1, kY0 = 2, kK1 = 3, kK2 = 4 };

BlockSystem assemble_blocks(const ModelParams& p, const XiTerms& xi,
                            const AssemblyOptions& options = {});

// Linearised follower subsystem on (xhat, xbar0 | k1, k2) used to propagate
// a deterministic change of the leader control into the mean field.
FbsdeBlocks follower_response_blocks(const ModelParams& p, const XiTerms& xi);

// det of the lower-right block of exp(coupled_drift * t).
double coupling_determinant(const Matrix& coupled_drift, double t);

struct SolvabilityReport {
  TimeGrid grid;
  std::vector<double> det_values;
  double min_det = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

// Evaluates the determinant at every node and passes when each value exceeds
// threshold.
SolvabilityReport solvability_scan(const BlockSystem& system,
                                   const TimeGrid& grid,
                                   double threshold = 1e-8);

}  // namespace lfmf
