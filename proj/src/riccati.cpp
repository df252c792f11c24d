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

#include "lfmf/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace lfmf {

namespace {

constexpr double kBlowUp = 1e12;
constexpr double kMinRcond = 1e-14;

struct Partition {
  Matrix m11, m12, m21, m22;
};

Partition partition(const FbsdeBlocks& blocks) {
  const Matrix m = blocks.coupled_drift();
  const auto k = blocks.forward_state.rows();
  return {m.topLeftCorner(k, k), m.topRightCorner(k, k),
          m.bottomLeftCorner(k, k), m.bottomRightCorner(k, k)};
}

Matrix riccati_rhs(const Partition& p, const Matrix& k) {
  return p.m21 + p.m22 * k - k * p.m11 - k * p.m12 * k;
}

// Cubic Hermite interpolation of K inside step s at fraction u.
Matrix hermite(const MatrixSeries& k, const std::vector<Matrix>& dk, int s,
               double u, double dt) {
  if (u == 0.0) return k[s];
  if (u == 1.0) return k[s + 1];
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1;
  const double h10 = u3 - 2 * u2 + u;
  const double h01 = -2 * u3 + 3 * u2;
  const double h11 = u3 - u2;
  return h00 * k[s] + (h10 * dt) * dk[static_cast<std::size_t>(s)] +
         h01 * k[s + 1] + (h11 * dt) * dk[static_cast<std::size_t>(s) + 1];
}

}  // namespace

Matrix riccati_rhs(const FbsdeBlocks& blocks, const Matrix& k) {
  return riccati_rhs(partition(blocks), k);
}

MatrixSeries solve_K_representation(const FbsdeBlocks& blocks,
                                    const TimeGrid& grid) {
  const Matrix m = blocks.coupled_drift();
  const auto n = blocks.forward_state.rows();
  const int steps = grid.steps();
  std::vector<Matrix> values(static_cast<std::size_t>(grid.nodes()));
  for (int k = 0; k <= steps; ++k) {
    const Matrix e = matrix_exponential(m * grid.time(steps - k));
    Eigen::PartialPivLU<Matrix> lu(e.bottomRightCorner(n, n));
    if (!(lu.rcond() > kMinRcond)) {
      throw NumericalError("representation singular at t=" +
                           std::to_string(grid.time(k)));
    }
    values[static_cast<std::size_t>(k)] = -lu.solve(e.bottomLeftCorner(n, n));
  }
  return MatrixSeries(grid, std::move(values));
}

MatrixSeries solve_K_ode(const FbsdeBlocks& blocks, const TimeGrid& grid) {
  const Partition p = partition(blocks);
  const auto n = blocks.forward_state.rows();
  const int steps = grid.steps();
  std::vector<Matrix> values(static_cast<std::size_t>(grid.nodes()));
  values.back() = Matrix::Zero(n, n);
  auto f = [&p](double, const Matrix& k) { return riccati_rhs(p, k); };
  for (int k = steps; k > 0; --k) {
    Matrix next = rk4_step(f, grid.time(k), values[static_cast<std::size_t>(k)],
                           -grid.dt());
    if (!all_finite(next) || next.cwiseAbs().maxCoeff() > kBlowUp) {
      throw NumericalError("Riccati blow-up at t=" +
                           std::to_string(grid.time(k - 1)));
    }
    values[static_cast<std::size_t>(k) - 1] = std::move(next);
  }
  return MatrixSeries(grid, std::move(values));
}

double riccati_residual(const FbsdeBlocks& blocks, const MatrixSeries& k) {
  const Partition p = partition(blocks);
  const double dt = k.grid().dt();
  double worst = 0.0;
  for (int j = 1; j + 1 < k.size(); ++j) {
    const Matrix dk = (k[j + 1] - k[j - 1]) / (2.0 * dt);
    worst = std::max(worst, (dk - riccati_rhs(p, k[j])).cwiseAbs().maxCoeff());
  }
  return worst;
}

VectorSeries solve_kappa(const FbsdeBlocks& blocks, const MatrixSeries& k,
                         const StepOffsets& offsets, const Vector& terminal) {
  const Partition p = partition(blocks);
  const TimeGrid& grid = k.grid();
  const double dt = grid.dt();
  const int steps = grid.steps();
  std::vector<Matrix> dk;
  dk.reserve(static_cast<std::size_t>(grid.nodes()));
  for (int j = 0; j <= steps; ++j) dk.push_back(riccati_rhs(p, k[j]));

  std::vector<Vector> values(static_cast<std::size_t>(grid.nodes()));
  values.back() = terminal;
  for (int s = steps - 1; s >= 0; --s) {
    const Vector b = offsets.forward(s);
    const Vector bhat = offsets.backward(s) - blocks.terminal_gain * b;
    // dkappa/dt = (M22 - K M12) kappa - K b + bhat - G b
    auto f = [&](double u, const Vector& kappa) {
      const Matrix kk = hermite(k, dk, s, u, dt);
      return Vector(p.m22 * kappa - kk * (p.m12 * kappa) - kk * b + bhat);
    };
    const Vector& y = values[static_cast<std::size_t>(s) + 1];
    const Vector k1 = f(1.0, y);
    const Vector k2 = f(0.5, y - (0.5 * dt) * k1);
    const Vector k3 = f(0.5, y - (0.5 * dt) * k2);
    const Vector k4 = f(0.0, y - dt * k3);
    values[static_cast<std::size_t>(s)] =
        y - (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return VectorSeries(grid, std::move(values));
}

VectorSeries solve_kappa(const BlockSystem& system, const MatrixSeries& k) {
  const StepOffsets offsets{[&](int) { return system.forward_offset; },
                            [&](int) { return system.backward_offset; }};
  return solve_kappa(system.blocks, k, offsets, system.terminal_offset);
}

Vector CouplingSolution::backward_state(int k, const Vector& x) const {
  return K[k] * x + terminal_gain * x + kappa[k];
}

Matrix CouplingSolution::feedback(int k) const { return K[k] + terminal_gain; }

CouplingSolution solve_coupling(const BlockSystem& system, const TimeGrid& grid) {
  MatrixSeries k = solve_K_representation(system.blocks, grid);
  VectorSeries kappa = solve_kappa(system, k);
  double asym = 0.0;
  for (const auto& kk : k.values()) {
    asym = std::max(asym, (kk - kk.transpose()).cwiseAbs().maxCoeff());
  }
  return CouplingSolution{grid, std::move(k), std::move(kappa),
                          system.blocks.terminal_gain, asym};
}

FollowerSolution solve_follower_riccati(const ModelParams& p,
                                        const TimeGrid& grid) {
  const Matrix s = follower_control_gain(p);
  const int steps = grid.steps();
  std::vector<Matrix> values(static_cast<std::size_t>(grid.nodes()));
  values.back() = p.g;
  auto f = [&](double, const Matrix& pb) {
    return Matrix(-(pb * p.a + p.a.transpose() * pb - pb * s * pb + p.q));
  };
  for (int k = steps; k > 0; --k) {
    Matrix next = rk4_step(f, grid.time(k), values[static_cast<std::size_t>(k)],
                           -grid.dt());
    next = 0.5 * (next + next.transpose()).eval();
    if (!all_finite(next) || next.cwiseAbs().maxCoeff() > kBlowUp) {
      throw NumericalError("follower Riccati blow-up at t=" +
                           std::to_string(grid.time(k - 1)));
    }
    values[static_cast<std::size_t>(k) - 1] = std::move(next);
  }
  return FollowerSolution{grid, MatrixSeries(grid, std::move(values))};
}

Vector phi_bar(const CouplingSolution& coupling, const FollowerSolution& follower,
               const Vector& x, double t) {
  const Matrix k = coupling.K.at(t);
  const Vector kappa = coupling.kappa.at(t);
  const Vector y = k * x + coupling.terminal_gain * x + kappa;
  const auto n = follower.pbar[0].rows();
  return y.segment(kK2 * n, n) - follower.pbar.at(t) * x.head(n);
}

}  // namespace lfmf
