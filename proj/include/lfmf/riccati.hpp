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

// Decoupling of the consistency system by the affine ansatz
// Y - G X = K X + kappa, and the follower feedback Riccati equation.

#pragma once

#include <functional>

#include "lfmf/assembly.hpp"
#include "lfmf/model.hpp"
#include "lfmf/numerics.hpp"

namespace lfmf {

// K(t) = -[lower-right of e^{M(T-t)}]^{-1} [lower-left of e^{M(T-t)}], with M
// the coupled drift of blocks. LU with partial pivoting at every node.
MatrixSeries solve_K_representation(const FbsdeBlocks& blocks,
                                    const TimeGrid& grid);

// Backward RK4 on the matrix Riccati equation from K(T) = 0.
MatrixSeries solve_K_ode(const FbsdeBlocks& blocks, const TimeGrid& grid);

// dK/dt as given by the Riccati equation at the value K.
Matrix riccati_rhs(const FbsdeBlocks& blocks, const Matrix& k);

// Largest entry of the Riccati residual at interior nodes, with dK/dt taken
// by central differences.
double riccati_residual(const FbsdeBlocks& blocks, const MatrixSeries& k);

// Forward offset b and backward offset bhat, constant on each step
// [t_k, t_{k+1}] and indexed by k.
struct StepOffsets {
  std::function<Vector(int)> forward;
  std::function<Vector(int)> backward;
};

// Backward RK4 for kappa from kappa(T) = terminal. K at step midpoints is
// cubic Hermite interpolated using riccati_rhs as the node derivative.
VectorSeries solve_kappa(const FbsdeBlocks& blocks, const MatrixSeries& k,
                         const StepOffsets& offsets, const Vector& terminal);

// Constant offsets taken from the assembled system.
VectorSeries solve_kappa(const BlockSystem& system, const MatrixSeries& k);

struct CouplingSolution {
  TimeGrid grid;
  MatrixSeries K;
  VectorSeries kappa;
  Matrix terminal_gain;
  double asymmetry = 0.0;  // max over nodes of |K - K'|

  // Y at node k for forward state x: (K + G) x + kappa.
  Vector backward_state(int k, const Vector& x) const;
  // Closed-loop gain K + G at node k.
  Matrix feedback(int k) const;
};

// Representation formula for K, then kappa.
CouplingSolution solve_coupling(const BlockSystem& system, const TimeGrid& grid);

struct FollowerSolution {
  TimeGrid grid;
  MatrixSeries pbar;
};

FollowerSolution solve_follower_riccati(const ModelParams& p,
                                        const TimeGrid& grid);

// phi = k2 - Pbar xhat at time t for the forward state x.
Vector phi_bar(const CouplingSolution& coupling, const FollowerSolution& follower,
               const Vector& x, double t);

}  // namespace lfmf
