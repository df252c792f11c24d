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

// Shared fixtures for the unit tests.

#pragma once

#include <random>

#include "lfmf/model.hpp"

namespace lfmf::testing {

inline Matrix random_matrix(std::mt19937_64& rng, int rows, int cols,
                            double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, int size, double scale) {
  return random_matrix(rng, size, 1, scale);
}

inline Matrix random_psd(std::mt19937_64& rng, int n, double scale) {
  const Matrix l = random_matrix(rng, n, n, scale);
  return l * l.transpose();
}

// Every coefficient, coupling and offset nonzero, with small magnitudes so
// that short horizons stay solvable.
inline ModelParams random_model(std::uint64_t seed, int n = 2, int m = 2,
                                int d = 2, double scale = 0.4) {
  std::mt19937_64 rng(seed);
  ModelParams p = zero_params(n, m, d);
  p.a0 = random_matrix(rng, n, n, scale);
  p.b0 = random_matrix(rng, n, m, 1.0);
  p.c0 = random_matrix(rng, n, n, scale);
  p.d0 = random_matrix(rng, n, d, scale);
  p.a = random_matrix(rng, n, n, scale);
  p.b = random_matrix(rng, n, m, 1.0);
  p.c = random_matrix(rng, n, n, scale);
  p.d_noise = random_matrix(rng, n, d, scale);
  p.f = random_matrix(rng, n, n, scale);
  p.q0 = random_psd(rng, n, scale);
  p.g0 = random_psd(rng, n, scale);
  p.r0 = random_psd(rng, m, 0.5) + Matrix::Identity(m, m);
  p.theta0 = random_matrix(rng, n, n, scale);
  p.theta_hat0 = random_matrix(rng, n, n, scale);
  p.eta0 = random_vector(rng, n, 1.0);
  p.eta_hat0 = random_vector(rng, n, 1.0);
  p.q = random_psd(rng, n, scale);
  p.g = random_psd(rng, n, scale);
  p.r = random_psd(rng, m, 0.5) + Matrix::Identity(m, m);
  p.theta = random_matrix(rng, n, n, scale);
  p.theta1 = random_matrix(rng, n, n, scale);
  p.theta_hat = random_matrix(rng, n, n, scale);
  p.theta_hat1 = random_matrix(rng, n, n, scale);
  p.eta = random_vector(rng, n, 1.0);
  p.eta_hat = random_vector(rng, n, 1.0);
  p.alpha = 0.8;
  p.horizon = 1.0;
  p.xi0_mean = random_vector(rng, n, 1.0);
  p.xi0_std = Vector::Constant(n, 0.5);
  p.xi_mean = random_vector(rng, n, 1.0);
  p.xi_std = Vector::Constant(n, 0.5);
  return p;
}

}  // namespace lfmf::testing
