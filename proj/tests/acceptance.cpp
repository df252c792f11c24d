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

// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "lfmf/analysis.hpp"

namespace {

using namespace lfmf;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

Outcome transcription() {
  const ModelParams p = example51();
  const BlockSystem bs = assemble_blocks(p, compute_xi_terms(p));
  const Matrix a = make_matrix(5, 5, std::array<double, 25>{
      .10, .30, 0, 0, 0,  .01, .10, 0, 0, 0,  0, 0, .05, 0, 0,
      0, 0, -.01, .10, .01,  0, 0, -.05, .30, .10});
  const Matrix b = make_matrix(5, 5, std::array<double, 25>{
      0, 0, 0, 0, -.0667,  0, 0, -.0980, 0, 0,  .0667, 0, 0, 0, -.0667,
      0, 0, 0, 0, 0,  0, -.0667, 0, 0, 0});
  const Matrix ahat = make_matrix(5, 5, std::array<double, 25>{
      -.81, .90, .90, 0, 0,  .939, -.93, -2.649, 1.83, -1.749,
      1.83, -1.92, -1.83, 1.92, -1.83,  1.83, -1.92, 0, 0, 0,
      -1.749, 1.83, 0, 0, 0});
  const Matrix bhat = make_matrix(5, 5, std::array<double, 25>{
      -.05, 0, 0, 0, 0,  .05, -.10, .01, 0, 0,  -.30, .30, -.10, 0, 0,
      0, 0, 0, -.10, -.30,  0, 0, 0, -.01, -.10});
  const double err = std::max(
      {(bs.blocks.forward_state - a).cwiseAbs().maxCoeff(),
       (bs.blocks.forward_coupling - b).cwiseAbs().maxCoeff(),
       (bs.blocks.backward_state - ahat).cwiseAbs().maxCoeff(),
       (bs.blocks.backward_coupling - bhat).cwiseAbs().maxCoeff()});
  return {err <= 5e-4, "max entry error " + num(err) + " (tol 5e-4)"};
}

Outcome solvability() {
  const ModelParams p = example51();
  const BlockSystem bs = assemble_blocks(p, compute_xi_terms(p));
  const double det = coupling_determinant(bs.coupled_drift, 6.0);
  const SolvabilityReport scan = solvability_scan(bs, TimeGrid(12.0, 2399));
  const bool ok = std::abs(det - 12.7053) <= 0.01 && scan.det_values.size() == 2400 &&
                  scan.min_det > 0.0;
  return {ok, "det(6) " + num(det) + " (12.7053 +- 0.01), min over " +
                  std::to_string(scan.det_values.size()) + " nodes " + num(scan.min_det)};
}

Outcome riccati_cross() {
  const ModelParams p = example51();
  const BlockSystem bs = assemble_blocks(p, compute_xi_terms(p));
  const TimeGrid g(12.0, 2400);
  const MatrixSeries rep = solve_K_representation(bs.blocks, g);
  const MatrixSeries ode = solve_K_ode(bs.blocks, g);
  double diff = 0.0;
  for (int k = 0; k < g.nodes(); ++k) {
    diff = std::max(diff, (rep[k] - ode[k]).cwiseAbs().maxCoeff());
  }
  const double residual = riccati_residual(bs.blocks, rep);
  return {diff <= 1e-6 && residual <= 1e-5,
          "max |K_rep - K_ode| " + num(diff) + " (tol 1e-6), residual " + num(residual) +
              " (tol 1e-5)"};
}

Outcome follower_riccati() {
  const ModelParams p = example51();
  const TimeGrid g(12.0, 2400);
  const FollowerSolution fs = solve_follower_riccati(p, g);
  const double a = p.a(0, 0);
  const double s = p.b(0, 0) * p.b(0, 0) / p.r(0, 0);
  const double q = p.q(0, 0);
  const double lambda = std::sqrt(a * a + s * q);
  double worst = 0.0;
  for (int k = 0; k < g.nodes(); ++k) {
    const double tau = p.horizon - g.time(k);
    const double sh = std::sinh(lambda * tau), ch = std::cosh(lambda * tau);
    worst = std::max(worst, std::abs(fs.pbar[k](0, 0) - q * sh / (lambda * ch - a * sh)));
  }
  const double terminal = fs.pbar[g.steps()](0, 0);
  return {worst <= 1e-7 && terminal == 0.0,
          "max closed-form error " + num(worst) + " (tol 1e-7), Pbar(T) " + num(terminal)};
}

Outcome convergence() {
  const SolvedSystem s = solve_system(example51(), TimeGrid(12.0, 2400));
  const ConvergenceReport r = convergence_study(s, {5, 10, 20, 40, 80}, 100, 1);
  bool ok = true;
  std::string detail;
  for (std::size_t j = 0; j < 3; ++j) {
    const double first = r.errors.front().mean[j];
    const double last = r.errors.back().mean[j];
    const double factor = last > 0.0 ? first / last : 0.0;
    const bool slope_ok = r.slopes[j] && *r.slopes[j] >= -1.3 && *r.slopes[j] <= -0.7;
    ok = ok && slope_ok && factor >= 8.0;
    detail += "eps" + std::to_string(j + 1) + " slope " +
              (r.slopes[j] ? num(*r.slopes[j]) : r.slope_notes[j]) + " factor " +
              num(factor) + (j < 2 ? ", " : "");
  }
  return {ok, detail + " (slopes in [-1.3, -0.7], factor >= 8)"};
}

Outcome cost_bounded() {
  const SolvedSystem s = solve_system(example51(), TimeGrid(12.0, 2400));
  const ConvergenceReport r = convergence_study(s, {10, 50, 100}, 100, 2);
  double lo = r.mean_costs[0].per_agent, hi = lo, sum = 0.0;
  for (const auto& c : r.mean_costs) {
    lo = std::min(lo, c.per_agent);
    hi = std::max(hi, c.per_agent);
    sum += c.per_agent;
  }
  const double variation = (hi - lo) / (sum / 3.0);
  bool trend_ok = true;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      const double se = std::hypot(r.cost_std_error[i], r.cost_std_error[j]);
      trend_ok = trend_ok && r.mean_costs[j].per_agent - r.mean_costs[i].per_agent <= 2.0 * se;
    }
  }
  std::string detail = "J_soc/N";
  for (std::size_t i = 0; i < 3; ++i) {
    detail += " N=" + std::to_string(r.n_values[i]) + ": " + num(r.mean_costs[i].per_agent) +
              " se " + num(r.cost_std_error[i]);
  }
  return {variation < 0.2 && trend_ok,
          detail + ", variation " + num(variation) + " (< 0.2), upward trend " +
              (trend_ok ? "none" : "beyond 2 se")};
}

Outcome probe() {
  const SolvedSystem s = solve_system(example51(), TimeGrid(12.0, 2400));
  ProbeOptions opt;
  opt.agents = 100;
  opt.directions = 50;
  opt.step = 0.05;
  const OptimalityProbe pr = optimality_probe(s, opt);
  const double allowance = pr.bound_estimate * pr.step;
  return {pr.entries.size() == 100 && pr.max_gain >= -allowance,
          "max_gain " + num(pr.max_gain) + " over " + std::to_string(pr.entries.size()) +
              " perturbations, allowance -" + num(allowance)};
}

Outcome degeneracy() {
  std::string detail;
  bool ok = true;
  {
    // No noise, zero offsets, deterministic initial data.
    ModelParams p = example51();
    p.d0.setZero();
    p.d_noise.setZero();
    p.xi0_std.setZero();
    p.xi_std.setZero();
    const BlockSystem bs = assemble_blocks(p, compute_xi_terms(p));
    const bool zero = bs.forward_offset.isZero(0.0) && bs.backward_offset.isZero(0.0) &&
                      bs.terminal_offset.isZero(0.0) && bs.coupled_offset.isZero(0.0) &&
                      bs.forward_noise.isZero(0.0);
    ok = ok && zero;
    detail += std::string("kappa source ") + (zero ? "zero" : "nonzero");
  }
  {
    const SolvedSystem s = solve_system(example51(), TimeGrid(12.0, 2400));
    bool zero = true;
    for (int k = 0; k < s.grid.nodes(); ++k) zero = zero && s.coupling.kappa[k].isZero(0.0);
    ok = ok && zero;
    detail += std::string(", kappa ") + (zero ? "zero" : "nonzero");
  }
  {
    ModelParams p = example51();
    p.d_noise.setZero();
    p.xi_std.setZero();
    p.xi_mean.setConstant(0.5);
    const SolvedSystem s = solve_system(p, TimeGrid(12.0, 600));
    double worst = 0.0;
    for (int agents : {1, 10, 100}) {
      const MeanFieldPath mf =
          sample_mean_field_path(s.system, s.coupling, s.params, s.grid, 5);
      const ErrorSample e = compute_errors(
          simulate_population(mf, s.follower, s.coupling, s.params, agents), mf);
      worst = std::max({worst, e.eps1, e.eps2, e.eps3});
    }
    ok = ok && worst == 0.0;
    detail += ", collapse eps max " + num(worst);
  }
  {
    ModelParams p = zero_params(1, 1, 1);
    p.a(0, 0) = 0.3;
    p.b(0, 0) = 1.0;
    p.b0(0, 0) = 1.0;
    p.q(0, 0) = 1.0;
    p.q0(0, 0) = 1.0;
    p.g(0, 0) = 0.5;
    const SolvedSystem s = solve_system(p, TimeGrid(1.0, 200));
    const MeanFieldPath mf = sample_mean_field_path(s.system, s.coupling, s.params, s.grid, 7);
    SimulationOptions opt;
    opt.record_agents = true;
    const PopulationRun run = simulate_population(mf, s.follower, s.coupling, s.params, 20, opt);
    const double j = std::max(std::abs(run.cost.j_soc),
                              std::abs(evaluate_social_cost(run, s.params).j_soc));
    ok = ok && j == 0.0;
    detail += ", homogeneous J_soc " + num(j);
  }
  return {ok, detail};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LFMF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("lfmf_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  const std::string base = "converge --config " + std::string(LFMF_SOURCE_DIR) +
                           "/configs/example51.json --seed 7 --runs 20 --out ";
  const int a = run_cli(base + (dir / "a").string());
  const int b = run_cli(base + (dir / "b").string());
  bool same = a == 0 && b == 0;
  int files = 0;
  for (const char* f : {"convergence.csv", "convergence_samples.csv",
                        "convergence_costs.csv", "slopes.csv"}) {
    const std::string x = slurp(dir / "a" / f);
    same = same && !x.empty() && x == slurp(dir / "b" / f);
    ++files;
  }
  fs::remove_all(dir);
  return {same, std::to_string(files) + " CSV files " +
                    (same ? "byte-identical" : "differ or missing") + " across two runs"};
}

}  // namespace

int main() {
  const std::array<std::pair<const char*, std::function<Outcome()>>, 9> criteria{{
      {"example transcription", transcription},
      {"solvability determinant", solvability},
      {"Riccati cross-oracle", riccati_cross},
      {"follower Riccati closed form", follower_riccati},
      {"convergence rates", convergence},
      {"cost boundedness", cost_bounded},
      {"optimality probe", probe},
      {"degeneracy suite", degeneracy},
      {"converge determinism", determinism},
  }};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
