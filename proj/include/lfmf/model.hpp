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

// Problem data for one leader and N statistically identical followers:
// linear state dynamics, quadratic costs with couplings to the population
// average, the social weight alpha, and the initial-condition laws.

#pragma once

#include "lfmf/numerics.hpp"

namespace lfmf {

// Coefficients are constant in time.
struct ModelParams {
  int n = 1;  // state dimension
  int m = 1;  // control dimension
  int d = 1;  // noise dimension

  // Leader: dx0 = [a0 x0 + b0 u0 + c0 x^(N)] dt + d0 dW0.
  Matrix a0, b0, c0, d0;
  // Follower: dxi = [a xi + b ui + c x^(N) + f x0] dt + d dWi.
  Matrix a, b, c, d_noise, f;

  // Leader cost weights and couplings.
  Matrix q0, g0, r0, theta0, theta_hat0;
  Vector eta0, eta_hat0;
  // Follower cost weights and couplings.
  Matrix q, g, r, theta, theta1, theta_hat, theta_hat1;
  Vector eta, eta_hat;

  double alpha = 1.0;
  double horizon = 1.0;

  // Gaussian initial laws, componentwise standard deviations.
  Vector xi0_mean, xi0_std;
  Vector xi_mean, xi_std;
};

// All-zero data of the requested shape with unit R, R0 and T = 1.
ModelParams zero_params(int n, int m, int d);

// The scalar benchmark system used throughout the docs and tests.
ModelParams example51();

// Checks shapes, finiteness, symmetry, Q0, Q, G0, G >= 0 and R0, R > delta I.
// Returns a copy of p on success; throws ValidationError or DimensionError.
ModelParams validate_params(const ModelParams& p, double delta = 1e-8);

// Shorthand quadratic-cost combinations that appear in the consistency
// system. The *_g members are the terminal-cost counterparts.
struct XiTerms {
  Matrix xi1, xi2, xi4;
  Vector xi3, xi5;
  Matrix xi1_g, xi2_g, xi4_g;
  Vector xi3_g, xi5_g;
};

XiTerms compute_xi_terms(const ModelParams& p);

// B R^{-1} B' for the followers and B0 (alpha R0)^{-1} B0' for the leader.
Matrix follower_control_gain(const ModelParams& p);
Matrix leader_control_gain(const ModelParams& p);

}  // namespace lfmf
