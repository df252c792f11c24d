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

#include "lfmf/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lfmf {

namespace {

std::span<double> as_span(Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void check_grid(const TimeGrid& a, const TimeGrid& b, const char* what) {
  if (!(a == b)) throw DimensionError(std::string(what) + ": grid mismatch");
}

void fill_normals(const NoiseStream& stream, NoisePurpose purpose,
                  std::uint32_t agent, std::uint32_t step, Vector& out) {
  stream.normals(purpose, agent, step, std::span<double>(out.data(), out.size()));
}

double quad(const Matrix& w, const Vector& v) { return v.dot(w * v); }

// Evaluates a column of a per-step shift at node k.
Eigen::VectorXd step_value(const Matrix& shift, int k) {
  const int steps = static_cast<int>(shift.cols());
  return shift.col(std::min(k, steps - 1));
}

void check_perturbation(const Perturbation& pert, const ModelParams& p,
                        const TimeGrid& grid, int agents) {
  auto expect = [](const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   const char* name) {
    if (m.size() != 0 && (m.rows() != rows || m.cols() != cols)) {
      throw DimensionError(std::string("perturbation: bad shape of ") + name);
    }
  };
  expect(pert.leader, p.m, grid.steps(), "leader");
  expect(pert.xhat_shift, p.n, grid.nodes(), "xhat_shift");
  expect(pert.xbar0_shift, p.n, grid.nodes(), "xbar0_shift");
  expect(pert.k2_shift, p.n, grid.nodes(), "k2_shift");
  expect(pert.follower_shift, p.m, grid.steps(), "follower_shift");
  if (pert.follower >= agents) {
    throw DimensionError("perturbation: follower index out of range");
  }
  if (pert.follower >= 0 && pert.follower_shift.size() == 0) {
    throw DimensionError("perturbation: follower shift missing");
  }
}

// Follower initial states minus their common mean.
AgentBlock initial_deviations(const ModelParams& p, std::size_t count,
                              const NoiseStream& stream) {
  AgentBlock out(p.n, count);
  Vector z(p.n);
  for (std::size_t i = 0; i < count; ++i) {
    fill_normals(stream, NoisePurpose::kInitial, static_cast<std::uint32_t>(i + 1), 0, z);
    for (int r = 0; r < p.n; ++r) out.at(r, i) = p.xi_std[r] * z[r];
  }
  return out;
}

}  // namespace

double trapezoid_weight(const TimeGrid& grid, int k) {
  return (k == 0 || k == grid.steps()) ? 0.5 * grid.dt() : grid.dt();
}

MeanFieldPath sample_mean_field_path(const BlockSystem& system,
                                     const CouplingSolution& coupling,
                                     const ModelParams& p, const TimeGrid& grid,
                                     std::uint64_t seed, std::uint32_t run) {
  check_grid(grid, coupling.grid, "sample_mean_field_path");
  const int n = system.n;
  const int dim = 5 * n;
  const NoiseStream stream(seed, run);
  MeanFieldPath mf{grid, n, Matrix::Zero(dim, grid.nodes()),
                   Matrix::Zero(dim, grid.nodes()), Matrix::Zero(p.d, grid.steps()),
                   seed, run};

  Vector z(n);
  fill_normals(stream, NoisePurpose::kInitial, 0, 0, z);
  Vector x = Vector::Zero(dim);
  x.segment(kXHat * n, n) = p.xi_mean;
  x.segment(kXBar0 * n, n) = p.xi0_mean + p.xi0_std.cwiseProduct(z);

  const Matrix& fa = system.blocks.forward_state;
  const Matrix& fb = system.blocks.forward_coupling;
  const double sqdt = std::sqrt(grid.dt());
  Vector w(p.d);
  for (int k = 0;; ++k) {
    const Vector y = coupling.backward_state(k, x);
    mf.x.col(k) = x;
    mf.y.col(k) = y;
    if (k == grid.steps()) break;
    fill_normals(stream, NoisePurpose::kIncrement, 0, static_cast<std::uint32_t>(k), w);
    w *= sqdt;
    mf.w0_increments.col(k) = w;
    const Vector drift = fa * x + fb * y + system.forward_offset;
    x = x + grid.dt() * drift + system.forward_noise * w;
    if (!all_finite(x)) {
      throw NumericalError("mean-field path diverged at t=" +
                           std::to_string(grid.time(k + 1)));
    }
  }
  return mf;
}

PopulationNoise sample_population_noise(const ModelParams& p,
                                        const TimeGrid& grid, int agents,
                                        std::uint64_t seed, std::uint32_t run) {
  if (agents < 1) throw ValidationError("population needs at least one agent");
  const auto count = static_cast<std::size_t>(agents);
  const NoiseStream stream(seed, run);
  PopulationNoise noise{initial_deviations(p, count, stream), {}};
  const double sqdt = std::sqrt(grid.dt());
  Vector w(p.d);
  noise.increments.reserve(static_cast<std::size_t>(grid.steps()));
  for (int k = 0; k < grid.steps(); ++k) {
    AgentBlock block(p.d, count);
    for (std::size_t i = 0; i < count; ++i) {
      fill_normals(stream, NoisePurpose::kIncrement, static_cast<std::uint32_t>(i + 1),
                   static_cast<std::uint32_t>(k), w);
      for (int r = 0; r < p.d; ++r) block.at(r, i) = sqdt * w[r];
    }
    noise.increments.push_back(std::move(block));
  }
  return noise;
}

PopulationRun simulate_population(const MeanFieldPath& mf,
                                  const FollowerSolution& follower,
                                  const CouplingSolution& coupling,
                                  const ModelParams& p, int agents,
                                  const SimulationOptions& options) {
  if (agents < 1) throw ValidationError("population needs at least one agent");
  check_grid(mf.grid, follower.grid, "simulate_population");
  check_grid(mf.grid, coupling.grid, "simulate_population");
  const TimeGrid& grid = mf.grid;
  const int n = p.n;
  const int m = p.m;
  const int steps = grid.steps();
  const double dt = grid.dt();
  const auto count = static_cast<std::size_t>(agents);
  const Perturbation* pert = options.perturbation;
  if (pert != nullptr) check_perturbation(*pert, p, grid, agents);
  const PopulationNoise* cached = options.noise;
  if (cached != nullptr &&
      (cached->initial.agents() != count ||
       static_cast<int>(cached->increments.size()) != steps)) {
    throw DimensionError("simulate_population: noise cache does not match");
  }
  const NoiseStream stream(mf.seed, mf.run);

  const RowMajorMatrix ra = p.a;
  const RowMajorMatrix rb = p.b;
  const RowMajorMatrix rd = p.d_noise;
  const RowMajorMatrix rq = p.q;
  const RowMajorMatrix rr = p.r;
  const RowMajorMatrix rg = p.g;
  const RowMajorMatrix gain = -p.r.llt().solve(p.b.transpose());  // -R^{-1} B'
  const RowMajorMatrix id_m = RowMajorMatrix::Identity(m, m);
  const Matrix leader_gain = -(p.alpha * p.r0).llt().solve(p.b0.transpose());

  PopulationRun run;
  run.agents = agents;
  run.grid = grid;
  run.seed = mf.seed;
  run.run = mf.run;
  run.x0_star = Matrix::Zero(n, grid.nodes());
  run.u0_star = Matrix::Zero(m, grid.nodes());
  run.mean_x_star = Matrix::Zero(n, grid.nodes());
  run.mean_xbar = Matrix::Zero(n, grid.nodes());
  run.mean_p = Matrix::Zero(n, grid.nodes());
  run.cost.ji.assign(count, 0.0);

  // Deviations from the (possibly shifted) mean field: delta = xbar_i - xhat,
  // e = x*_i - xhat, f = x0* - xbar0.
  AgentBlock delta = cached != nullptr ? cached->initial
                                       : initial_deviations(p, count, stream);
  AgentBlock e = delta;
  Vector f = Vector::Zero(n);
  AgentBlock pb(n, count), u(m, count), du(m, count), tmp(n, count);
  AgentBlock dw(p.d, count);
  Vector e_mean(n), delta_mean(n), sums(n), u_mf(m), neg_u_mf(m), center(n);
  Vector xhat(n), xbar0(n), k2(n), x_mean(n), x0(n), u0(m), bias(n);
  Vector w(p.d);
  double j0 = 0.0;

  for (int k = 0;; ++k) {
    xhat = mf.block(k, kXHat);
    xbar0 = mf.block(k, kXBar0);
    k2 = mf.block(k, kK2);
    if (pert != nullptr && pert->xhat_shift.size() != 0) {
      xhat += pert->xhat_shift.col(k);
      xbar0 += pert->xbar0_shift.col(k);
      k2 += pert->k2_shift.col(k);
    }
    const RowMajorMatrix pbar = follower.pbar[k];

    for (int r = 0; r < m; ++r) {
      double acc = 0.0;
      for (int c = 0; c < n; ++c) acc = acc + gain(r, c) * k2[c];
      u_mf[r] = acc;
    }
    neg_u_mf = -u_mf;

    kernels::affine_map(pbar, as_span(k2), delta, pb);
    kernels::affine_map(gain, {}, pb, u);
    kernels::affine_map(id_m, as_span(neg_u_mf), u, du);
    Vector follower_shift;
    if (pert != nullptr && pert->follower >= 0) {
      follower_shift = step_value(pert->follower_shift, k);
      const auto j = static_cast<std::size_t>(pert->follower);
      for (int r = 0; r < m; ++r) u.at(r, j) += follower_shift[r];
    }

    kernels::row_sums(e, as_span(sums));
    e_mean = sums / static_cast<double>(agents);
    kernels::row_sums(delta, as_span(sums));
    delta_mean = sums / static_cast<double>(agents);

    x_mean = xhat + e_mean;
    x0 = xbar0 + f;
    u0 = leader_gain * mf.block(k, kY0);
    if (pert != nullptr && pert->leader.size() != 0) u0 += step_value(pert->leader, k);

    run.mean_x_star.col(k) = x_mean;
    run.mean_xbar.col(k) = xhat + delta_mean;
    run.mean_p.col(k) = k2 + follower.pbar[k] * delta_mean;
    run.x0_star.col(k) = x0;
    run.u0_star.col(k) = u0;
    if (options.record_agents) {
      AgentBlock xs(n, count), xb(n, count);
      const RowMajorMatrix id_n = RowMajorMatrix::Identity(n, n);
      kernels::affine_map(id_n, as_span(xhat), e, xs);
      kernels::affine_map(id_n, as_span(xhat), delta, xb);
      run.x_star.push_back(std::move(xs));
      run.xbar.push_back(std::move(xb));
      run.p.push_back(pb);
      run.u.push_back(u);
    }

    // Running cost.
    const double wk = trapezoid_weight(grid, k);
    j0 += wk * (quad(p.q0, Vector(x0 - p.theta0 * x_mean - p.eta0)) +
                quad(p.r0, u0));
    center = p.theta * x_mean + p.theta1 * x0 + p.eta - xhat;
    kernels::accumulate_quadratic(rq, as_span(center), e, wk, run.cost.ji);
    const Vector zero_m = Vector::Zero(m);
    kernels::accumulate_quadratic(rr, as_span(zero_m), u, wk, run.cost.ji);

    if (k == steps) {
      j0 += quad(p.g0, Vector(x0 - p.theta_hat0 * x_mean - p.eta_hat0));
      center = p.theta_hat * x_mean + p.theta_hat1 * x0 + p.eta_hat - xhat;
      kernels::accumulate_quadratic(rg, as_span(center), e, 1.0,
                                    run.cost.ji);
      break;
    }

    const AgentBlock* incr = &dw;
    if (cached != nullptr) {
      incr = &cached->increments[static_cast<std::size_t>(k)];
    } else {
      const double sqdt = std::sqrt(dt);
      for (std::size_t i = 0; i < count; ++i) {
        fill_normals(stream, NoisePurpose::kIncrement, static_cast<std::uint32_t>(i + 1),
                     static_cast<std::uint32_t>(k), w);
        for (int r = 0; r < p.d; ++r) dw.at(r, i) = sqdt * w[r];
      }
    }

    // Realized followers.
    bias = p.c * e_mean + p.f * f;
    kernels::affine_map(ra, as_span(bias), e, tmp);
    kernels::accumulate_product(rb, 1.0, du, tmp);
    if (pert != nullptr && pert->follower >= 0) {
      const Vector push = p.b * follower_shift;
      const auto j = static_cast<std::size_t>(pert->follower);
      for (int r = 0; r < n; ++r) tmp.at(r, j) += push[r];
    }
    kernels::axpy(dt, tmp, e);
    kernels::accumulate_product(rd, 1.0, *incr, e);

    // Auxiliary followers.
    kernels::affine_map(ra, {}, delta, tmp);
    kernels::accumulate_product(rb, 1.0, du, tmp);
    kernels::axpy(dt, tmp, delta);
    kernels::accumulate_product(rd, 1.0, *incr, delta);

    // Leader, relative to xbar0.
    f = f + dt * (p.a0 * f + p.c0 * e_mean);
  }

  run.cost.j0 = j0;
  double total = 0.0;
  for (double v : run.cost.ji) total += v;
  run.cost.ji_sum = total;
  run.cost.j_soc = p.alpha * agents * j0 + total;
  run.cost.per_agent = run.cost.j_soc / agents;
  for (double v : run.cost.ji) {
    if (!std::isfinite(v)) throw NumericalError("population cost not finite");
  }
  return run;
}

ErrorSample compute_errors(const PopulationRun& run, const MeanFieldPath& mf) {
  check_grid(run.grid, mf.grid, "compute_errors");
  ErrorSample s;
  for (int k = 0; k < mf.grid.nodes(); ++k) {
    const double w = trapezoid_weight(mf.grid, k);
    s.eps1 += w * (run.mean_x_star.col(k) - mf.block(k, kXHat)).squaredNorm();
    s.eps2 += w * (run.x0_star.col(k) - mf.block(k, kXBar0)).squaredNorm();
    s.eps3 += w * (run.mean_p.col(k) - mf.block(k, kK2)).squaredNorm();
  }
  return s;
}

ErrorReport aggregate_errors(std::vector<ErrorSample> samples) {
  ErrorReport report;
  report.samples = std::move(samples);
  const double count = static_cast<double>(report.samples.size());
  if (report.samples.empty()) return report;
  for (int j = 0; j < 3; ++j) {
    auto get = [j](const ErrorSample& s) {
      return j == 0 ? s.eps1 : (j == 1 ? s.eps2 : s.eps3);
    };
    double sum = 0.0;
    for (const auto& s : report.samples) sum += get(s);
    const double mean = sum / count;
    double ss = 0.0;
    for (const auto& s : report.samples) ss += (get(s) - mean) * (get(s) - mean);
    report.mean[static_cast<std::size_t>(j)] = mean;
    report.std_error[static_cast<std::size_t>(j)] =
        count > 1 ? std::sqrt(ss / (count - 1) / count) : 0.0;
  }
  return report;
}

CostReport evaluate_social_cost(const PopulationRun& run, const ModelParams& p) {
  const TimeGrid& grid = run.grid;
  if (static_cast<int>(run.x_star.size()) != grid.nodes() ||
      static_cast<int>(run.u.size()) != grid.nodes()) {
    throw ValidationError("evaluate_social_cost: agent trajectories not recorded");
  }
  const auto count = static_cast<std::size_t>(run.agents);
  const RowMajorMatrix rq = p.q, rr = p.r, rg = p.g;
  CostReport c;
  c.ji.assign(count, 0.0);
  const Vector zero_m = Vector::Zero(p.m);
  Vector center(p.n), sums(p.n);
  for (int k = 0; k < grid.nodes(); ++k) {
    const double w = trapezoid_weight(grid, k);
    const auto& xs = run.x_star[static_cast<std::size_t>(k)];
    kernels::row_sums(xs, as_span(sums));
    const Vector x_mean = sums / static_cast<double>(run.agents);
    const Vector x0 = run.x0_star.col(k);
    const Vector u0 = run.u0_star.col(k);
    c.j0 += w * (quad(p.q0, Vector(x0 - p.theta0 * x_mean - p.eta0)) + quad(p.r0, u0));
    center = p.theta * x_mean + p.theta1 * x0 + p.eta;
    kernels::accumulate_quadratic(rq, as_span(center), xs, w, c.ji);
    kernels::accumulate_quadratic(rr, as_span(zero_m),
                                  run.u[static_cast<std::size_t>(k)], w, c.ji);
    if (k == grid.steps()) {
      c.j0 += quad(p.g0, Vector(x0 - p.theta_hat0 * x_mean - p.eta_hat0));
      center = p.theta_hat * x_mean + p.theta_hat1 * x0 + p.eta_hat;
      kernels::accumulate_quadratic(rg, as_span(center), xs, 1.0, c.ji);
    }
  }
  for (double v : c.ji) c.ji_sum += v;
  c.j_soc = p.alpha * run.agents * c.j0 + c.ji_sum;
  c.per_agent = c.j_soc / run.agents;
  return c;
}

}  // namespace lfmf
