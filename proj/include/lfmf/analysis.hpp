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

// Monte Carlo studies built on the simulator: the convergence of the
// population to its mean-field limit as N grows, and a perturbation probe of
// the decentralized strategies.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lfmf/assembly.hpp"
#include "lfmf/model.hpp"
#include "lfmf/riccati.hpp"
#include "lfmf/simulate.hpp"

namespace lfmf {

// Everything the simulations need, solved once per parameter set.
struct SolvedSystem {
  ModelParams params;
  XiTerms xi;
  BlockSystem system;
  TimeGrid grid;
  SolvabilityReport solvability;
  CouplingSolution coupling;
  FollowerSolution follower;
};

// Validates, assembles, scans and solves. Throws SolvabilityError when the
// determinant scan fails.
SolvedSystem solve_system(const ModelParams& p, const TimeGrid& grid,
                          const AssemblyOptions& options = {});

// Worker count: MF_STACKELBERG_THREADS when set, else hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, count) on up to threads workers. The first
// exception thrown by any job is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

struct ConvergenceReport {
  std::vector<int> n_values;
  int runs_per_n = 0;
  std::uint64_t master_seed = 0;
  std::vector<ErrorReport> errors;  // one per N
  // Log-log slope per error functional, or the reason it is unavailable.
  std::array<std::optional<double>, 3> slopes;
  std::array<std::string, 3> slope_notes;
  std::vector<CostReport> mean_costs;  // per N, averaged over runs
  std::vector<double> cost_std_error;  // per N, of per_agent
};

ConvergenceReport convergence_study(const SolvedSystem& solved,
                                    const std::vector<int>& n_values,
                                    int runs_per_n, std::uint64_t master_seed,
                                    int threads = 0);

ConvergenceReport convergence_study(const ModelParams& p,
                                    const std::vector<int>& n_values,
                                    int runs_per_n, const TimeGrid& grid,
                                    std::uint64_t master_seed);

// Change of (xhat, xbar0, k2) caused by a deterministic change du0 of the
// leader control (m x steps), through the followers' linearised response.
struct MeanFieldResponse {
  Matrix xhat;   // n x nodes
  Matrix xbar0;  // n x nodes
  Matrix k2;     // n x nodes
};

MeanFieldResponse leader_response(const SolvedSystem& solved, const Matrix& du0);

// Piecewise-constant direction with the given number of pieces, unit L2 norm
// on the grid (rectangle rule over steps). m x steps.
Matrix probe_direction(const TimeGrid& grid, int m, int pieces,
                       std::uint64_t seed, std::uint32_t index);

struct ProbeEntry {
  int direction = 0;
  std::string target;        // "leader" or "follower"
  double delta = 0.0;        // change of J_soc / N at step
  double delta_half = 0.0;   // change at step / 2
  double first_order = 0.0;  // 4 delta_half - delta
  double second_order = 0.0; // delta - first_order
  double std_error = 0.0;    // of delta over runs
};

struct OptimalityProbe {
  int agents = 0;
  int directions = 0;
  int runs = 0;
  double step = 0.0;
  double base_per_agent = 0.0;
  double bound_estimate = 0.0;  // base_per_agent / sqrt(N)
  double max_gain = 0.0;        // most negative delta
  std::vector<ProbeEntry> entries;
};

struct ProbeOptions {
  int agents = 100;
  int directions = 50;
  double step = 0.05;
  int runs = 64;
  int pieces = 12;
  std::uint64_t seed = 1;
  int threads = 0;
};

OptimalityProbe optimality_probe(const SolvedSystem& solved,
                                 const ProbeOptions& options);

}  // namespace lfmf
