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

// Monte Carlo simulation of the mean-field limit and of the finite
// population under the decentralized strategies, plus the error and cost
// functionals evaluated along the simulated paths.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lfmf/assembly.hpp"
#include "lfmf/kernels.hpp"
#include "lfmf/model.hpp"
#include "lfmf/noise.hpp"
#include "lfmf/riccati.hpp"

namespace lfmf {

// One sample of the limiting forward-backward state. Columns are nodes.
struct MeanFieldPath {
  TimeGrid grid;
  int n = 0;
  Matrix x;             // 5n x nodes
  Matrix y;             // 5n x nodes
  Matrix w0_increments; // d x steps
  std::uint64_t seed = 0;
  std::uint32_t run = 0;

  Vector block(int k, Block b) const { return x.col(k).segment(b * n, n); }
  Vector block(int k, BackwardBlock b) const { return y.col(k).segment(b * n, n); }
};

// Euler-Maruyama on dX = (A X + B Y + b) dt + D dW0 with Y = (K + G) X + kappa.
// X(0) = (xi mean, sampled xi0, 0, 0, 0).
MeanFieldPath sample_mean_field_path(const BlockSystem& system,
                                     const CouplingSolution& coupling,
                                     const ModelParams& p, const TimeGrid& grid,
                                     std::uint64_t seed, std::uint32_t run = 0);

// Initial deviations and Brownian increments for followers 1..N of one run.
struct PopulationNoise {
  AgentBlock initial;                  // n x N, already scaled by xi std
  std::vector<AgentBlock> increments;  // per step, d x N, scaled by sqrt(dt)
};

PopulationNoise sample_population_noise(const ModelParams& p,
                                        const TimeGrid& grid, int agents,
                                        std::uint64_t seed, std::uint32_t run);

// Deterministic changes applied on top of the decentralized strategies.
// Control shifts are per step (the value on step k also applies at node k,
// and the last step's value at node M); reference shifts are per node.
struct Perturbation {
  Matrix leader;        // m x steps, added to u0
  Matrix xhat_shift;    // n x nodes
  Matrix xbar0_shift;   // n x nodes
  Matrix k2_shift;      // n x nodes
  int follower = -1;    // index of the deviating follower, or -1
  Matrix follower_shift;  // m x steps, added to that follower's control
};

struct SimulationOptions {
  bool record_agents = false;
  const Perturbation* perturbation = nullptr;
  const PopulationNoise* noise = nullptr;  // regenerated when null
};

struct CostReport {
  double j0 = 0.0;
  double ji_sum = 0.0;
  double j_soc = 0.0;
  double per_agent = 0.0;
  std::vector<double> ji;
};

struct PopulationRun {
  int agents = 0;
  TimeGrid grid{1.0, 2};
  std::uint64_t seed = 0;
  std::uint32_t run = 0;

  Matrix x0_star;      // n x nodes
  Matrix u0_star;      // m x nodes
  Matrix mean_x_star;  // n x nodes
  Matrix mean_xbar;    // n x nodes
  Matrix mean_p;       // n x nodes

  // Per node, filled only with record_agents.
  std::vector<AgentBlock> x_star, xbar, p, u;

  // Social cost accumulated during the simulation.
  CostReport cost;
};

PopulationRun simulate_population(const MeanFieldPath& mf,
                                  const FollowerSolution& follower,
                                  const CouplingSolution& coupling,
                                  const ModelParams& p, int agents,
                                  const SimulationOptions& options = {});

struct ErrorSample {
  double eps1 = 0.0;  // integral of |x*^(N) - xhat|^2
  double eps2 = 0.0;  // integral of |x0* - xbar0|^2
  double eps3 = 0.0;  // integral of |p^(N) - k2|^2
};

ErrorSample compute_errors(const PopulationRun& run, const MeanFieldPath& mf);

struct ErrorReport {
  std::vector<ErrorSample> samples;
  std::array<double, 3> mean{};
  std::array<double, 3> std_error{};
};

ErrorReport aggregate_errors(std::vector<ErrorSample> samples);

// Recomputes the social cost from recorded trajectories.
CostReport evaluate_social_cost(const PopulationRun& run, const ModelParams& p);

// Trapezoid weights of the grid.
double trapezoid_weight(const TimeGrid& grid, int k);

}  // namespace lfmf
