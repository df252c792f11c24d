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

#include "lfmf/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

namespace lfmf {

SolvedSystem solve_system(const ModelParams& params, const TimeGrid& grid,
                          const AssemblyOptions& options) {
  ModelParams p = validate_params(params);
  if (std::abs(grid.horizon() - p.horizon) > 1e-12 * std::max(1.0, p.horizon)) {
    throw ValidationError("grid horizon differs from model horizon");
  }
  XiTerms xi = compute_xi_terms(p);
  BlockSystem system = assemble_blocks(p, xi, options);
  SolvabilityReport scan = solvability_scan(system, grid);
  if (!scan.passed) throw SolvabilityError("system not solvable on [0,T]");
  CouplingSolution coupling = solve_coupling(system, grid);
  FollowerSolution follower = solve_follower_riccati(p, grid);
  return SolvedSystem{std::move(p), std::move(xi), std::move(system), grid,
                      std::move(scan), std::move(coupling), std::move(follower)};
}

int worker_count() {
  const int hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("MF_STACKELBERG_THREADS");
  if (env == nullptr || *env == '\0') return hw;
  char* end = nullptr;
  const long cap = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || cap < 1) return hw;
  return static_cast<int>(std::min<long>(cap, hw));
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads <= 0) threads = worker_count();
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

double error_component(const ErrorReport& r, int j) {
  return r.mean[static_cast<std::size_t>(j)];
}

}  // namespace

ConvergenceReport convergence_study(const SolvedSystem& solved,
                                    const std::vector<int>& n_values,
                                    int runs_per_n, std::uint64_t master_seed,
                                    int threads) {
  if (n_values.empty()) throw ValidationError("convergence study needs N values");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 1 || (i > 0 && n_values[i] <= n_values[i - 1])) {
      throw ValidationError("N values must be positive and strictly increasing");
    }
  }
  if (runs_per_n < 1) throw ValidationError("runs per N must be positive");

  const std::size_t cells = n_values.size();
  const auto runs = static_cast<std::size_t>(runs_per_n);
  std::vector<std::vector<ErrorSample>> samples(cells, std::vector<ErrorSample>(runs));
  std::vector<std::vector<CostReport>> costs(cells, std::vector<CostReport>(runs));

  parallel_for(runs, threads, [&](std::size_t r) {
    const auto run_id = static_cast<std::uint32_t>(r);
    const MeanFieldPath mf =
        sample_mean_field_path(solved.system, solved.coupling, solved.params,
                               solved.grid, master_seed, run_id);
    for (std::size_t c = 0; c < cells; ++c) {
      try {
        PopulationRun pop = simulate_population(mf, solved.follower, solved.coupling,
                                                solved.params, n_values[c]);
        samples[c][r] = compute_errors(pop, mf);
        pop.cost.ji.clear();
        costs[c][r] = std::move(pop.cost);
      } catch (const std::exception& ex) {
        throw NumericalError(std::string(ex.what()) + " (N=" +
                             std::to_string(n_values[c]) + ", seed=" +
                             std::to_string(master_seed) + ", run=" +
                             std::to_string(r) + ")");
      }
    }
  });

  ConvergenceReport report;
  report.n_values = n_values;
  report.runs_per_n = runs_per_n;
  report.master_seed = master_seed;
  for (std::size_t c = 0; c < cells; ++c) {
    report.errors.push_back(aggregate_errors(std::move(samples[c])));
    CostReport mean;
    for (const auto& cr : costs[c]) {
      mean.j0 += cr.j0;
      mean.ji_sum += cr.ji_sum;
      mean.j_soc += cr.j_soc;
      mean.per_agent += cr.per_agent;
    }
    const double count = static_cast<double>(runs);
    mean.j0 /= count;
    mean.ji_sum /= count;
    mean.j_soc /= count;
    mean.per_agent /= count;
    double ss = 0.0;
    for (const auto& cr : costs[c]) {
      ss += (cr.per_agent - mean.per_agent) * (cr.per_agent - mean.per_agent);
    }
    report.cost_std_error.push_back(runs > 1 ? std::sqrt(ss / (count - 1) / count) : 0.0);
    report.mean_costs.push_back(std::move(mean));
  }

  for (int j = 0; j < 3; ++j) {
    const auto idx = static_cast<std::size_t>(j);
    if (cells < 2) {
      report.slope_notes[idx] = "unavailable: need at least 2 N values";
      continue;
    }
    std::vector<std::pair<double, double>> points;
    for (std::size_t c = 0; c < cells; ++c) {
      points.emplace_back(n_values[c], error_component(report.errors[c], j));
    }
    try {
      report.slopes[idx] = loglog_slope(points).slope;
    } catch (const std::invalid_argument& ex) {
      report.slope_notes[idx] = std::string("unavailable: ") + ex.what();
    }
  }
  return report;
}

ConvergenceReport convergence_study(const ModelParams& p,
                                    const std::vector<int>& n_values,
                                    int runs_per_n, const TimeGrid& grid,
                                    std::uint64_t master_seed) {
  return convergence_study(solve_system(p, grid), n_values, runs_per_n, master_seed);
}

namespace {

MeanFieldResponse response_with(const FbsdeBlocks& blocks, const MatrixSeries& k,
                                const ModelParams& p, const Matrix& du0) {
  const TimeGrid& grid = k.grid();
  const int n = p.n;
  const Vector zero = Vector::Zero(2 * n);
  const StepOffsets offsets{
      [&](int s) {
        Vector b = Vector::Zero(2 * n);
        b.segment(n, n) = p.b0 * du0.col(s);
        return b;
      },
      [&](int) { return zero; }};
  const VectorSeries kappa = solve_kappa(blocks, k, offsets, zero);

  MeanFieldResponse out{Matrix::Zero(n, grid.nodes()), Matrix::Zero(n, grid.nodes()),
                        Matrix::Zero(n, grid.nodes())};
  Vector x = Vector::Zero(2 * n);
  for (int j = 0;; ++j) {
    const Vector y = k[j] * x + blocks.terminal_gain * x + kappa[j];
    out.xhat.col(j) = x.head(n);
    out.xbar0.col(j) = x.tail(n);
    out.k2.col(j) = y.tail(n);
    if (j == grid.steps()) break;
    const Vector drift = blocks.forward_state * x + blocks.forward_coupling * y +
                         offsets.forward(j);
    x = x + grid.dt() * drift;
  }
  return out;
}

}  // namespace

MeanFieldResponse leader_response(const SolvedSystem& solved, const Matrix& du0) {
  if (du0.rows() != solved.params.m || du0.cols() != solved.grid.steps()) {
    throw DimensionError("leader_response: direction must be m x steps");
  }
  const FbsdeBlocks blocks = follower_response_blocks(solved.params, solved.xi);
  const MatrixSeries k = solve_K_representation(blocks, solved.grid);
  return response_with(blocks, k, solved.params, du0);
}

Matrix probe_direction(const TimeGrid& grid, int m, int pieces,
                       std::uint64_t seed, std::uint32_t index) {
  const int steps = grid.steps();
  pieces = std::clamp(pieces, 1, steps);
  const NoiseStream stream(seed, 0);
  Matrix coef(m, pieces);
  Vector z(m);
  for (int j = 0; j < pieces; ++j) {
    stream.normals(NoisePurpose::kDirection, index, static_cast<std::uint32_t>(j),
                   std::span<double>(z.data(), z.size()));
    coef.col(j) = z;
  }
  Matrix d(m, steps);
  for (int k = 0; k < steps; ++k) {
    const auto piece = static_cast<int>(static_cast<long long>(k) * pieces / steps);
    d.col(k) = coef.col(piece);
  }
  const double norm = std::sqrt(d.squaredNorm() * grid.dt());
  if (!(norm > 0.0)) throw NumericalError("degenerate probe direction");
  return d / norm;
}

OptimalityProbe optimality_probe(const SolvedSystem& solved,
                                 const ProbeOptions& options) {
  if (options.step < 0.0 || !std::isfinite(options.step)) {
    throw ValidationError("probe step must be finite and non-negative");
  }
  if (options.agents < 1 || options.directions < 1 || options.runs < 1) {
    throw ValidationError("probe needs agents, directions and runs >= 1");
  }
  const ModelParams& p = solved.params;
  const TimeGrid& grid = solved.grid;
  const double h = options.step;
  const auto dirs = static_cast<std::size_t>(options.directions);

  const FbsdeBlocks blocks = follower_response_blocks(p, solved.xi);
  const MatrixSeries kf = solve_K_representation(blocks, grid);
  std::vector<Matrix> leader_dirs, follower_dirs;
  std::vector<MeanFieldResponse> responses;
  for (std::size_t j = 0; j < dirs; ++j) {
    const auto id = static_cast<std::uint32_t>(j);
    leader_dirs.push_back(probe_direction(grid, p.m, options.pieces, options.seed, 2 * id));
    follower_dirs.push_back(
        probe_direction(grid, p.m, options.pieces, options.seed, 2 * id + 1));
    responses.push_back(response_with(blocks, kf, p, leader_dirs.back()));
  }

  // deltas[run][4 * j + c]: c = leader h, leader h/2, follower h, follower h/2.
  const auto runs = static_cast<std::size_t>(options.runs);
  std::vector<std::vector<double>> deltas(runs, std::vector<double>(4 * dirs));
  std::vector<double> base(runs);
  parallel_for(runs, options.threads, [&](std::size_t r) {
    const auto run_id = static_cast<std::uint32_t>(r);
    const MeanFieldPath mf = sample_mean_field_path(solved.system, solved.coupling, p,
                                                    grid, options.seed, run_id);
    const PopulationNoise noise =
        sample_population_noise(p, grid, options.agents, options.seed, run_id);
    SimulationOptions sim;
    sim.noise = &noise;
    const double b = simulate_population(mf, solved.follower, solved.coupling, p,
                                         options.agents, sim).cost.per_agent;
    base[r] = b;
    for (std::size_t j = 0; j < dirs; ++j) {
      for (int half = 0; half < 2; ++half) {
        const double scale = half == 0 ? h : 0.5 * h;
        Perturbation lead;
        lead.leader = scale * leader_dirs[j];
        lead.xhat_shift = scale * responses[j].xhat;
        lead.xbar0_shift = scale * responses[j].xbar0;
        lead.k2_shift = scale * responses[j].k2;
        sim.perturbation = &lead;
        deltas[r][4 * j + static_cast<std::size_t>(half)] =
            simulate_population(mf, solved.follower, solved.coupling, p,
                                options.agents, sim).cost.per_agent - b;
        Perturbation fol;
        fol.follower = 0;
        fol.follower_shift = scale * follower_dirs[j];
        sim.perturbation = &fol;
        deltas[r][4 * j + 2 + static_cast<std::size_t>(half)] =
            simulate_population(mf, solved.follower, solved.coupling, p,
                                options.agents, sim).cost.per_agent - b;
      }
    }
  });

  OptimalityProbe probe;
  probe.agents = options.agents;
  probe.directions = options.directions;
  probe.runs = options.runs;
  probe.step = h;
  double base_sum = 0.0;
  for (double v : base) base_sum += v;
  probe.base_per_agent = base_sum / static_cast<double>(runs);
  probe.bound_estimate = probe.base_per_agent / std::sqrt(static_cast<double>(options.agents));

  const double count = static_cast<double>(runs);
  auto mean_of = [&](std::size_t col) {
    double s = 0.0;
    for (std::size_t r = 0; r < runs; ++r) s += deltas[r][col];
    return s / count;
  };
  auto se_of = [&](std::size_t col, double mean) {
    if (runs < 2) return 0.0;
    double ss = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
      ss += (deltas[r][col] - mean) * (deltas[r][col] - mean);
    }
    return std::sqrt(ss / (count - 1) / count);
  };
  probe.max_gain = 0.0;
  bool first = true;
  for (std::size_t j = 0; j < dirs; ++j) {
    for (int t = 0; t < 2; ++t) {
      const std::size_t col = 4 * j + 2 * static_cast<std::size_t>(t);
      ProbeEntry e;
      e.direction = static_cast<int>(j);
      e.target = t == 0 ? "leader" : "follower";
      e.delta = mean_of(col);
      e.delta_half = mean_of(col + 1);
      e.first_order = 4.0 * e.delta_half - e.delta;
      e.second_order = e.delta - e.first_order;
      e.std_error = se_of(col, e.delta);
      probe.max_gain = first ? e.delta : std::min(probe.max_gain, e.delta);
      first = false;
      probe.entries.push_back(std::move(e));
    }
  }
  return probe;
}

}  // namespace lfmf
