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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "lfmf/assembly.hpp"
#include "lfmf/riccati.hpp"
#include "lfmf/simulate.hpp"
#include "support.hpp"

namespace lfmf {
namespace {

using testing::random_model;
using testing::random_vector;

BlockSystem assemble(const ModelParams& p) {
  return assemble_blocks(p, compute_xi_terms(p));
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

StepOffsets zero_offsets(int size) {
  return {[size](int) { return Vector(Vector::Zero(size)); },
          [size](int) { return Vector(Vector::Zero(size)); }};
}

TEST(RiccatiK, TerminalValueIsZero) {
  const BlockSystem bs = assemble(random_model(1));
  const TimeGrid g(1.0, 50);
  EXPECT_TRUE(solve_K_representation(bs.blocks, g)[g.steps()].isZero(0.0));
  EXPECT_TRUE(solve_K_ode(bs.blocks, g)[g.steps()].isZero(0.0));
}

TEST(RiccatiK, ZeroCostGivesZero) {
  ModelParams p = zero_params(1, 1, 1);
  p.a(0, 0) = 0.2;
  p.a0(0, 0) = -0.1;
  p.b(0, 0) = 1.0;
  p.b0(0, 0) = 1.0;
  p.c(0, 0) = 0.3;
  p.f(0, 0) = 0.5;
  const BlockSystem bs = assemble(p);
  const TimeGrid g(2.0, 40);
  const MatrixSeries rep = solve_K_representation(bs.blocks, g);
  const MatrixSeries ode = solve_K_ode(bs.blocks, g);
  for (int k = 0; k < g.nodes(); ++k) {
    EXPECT_TRUE(rep[k].isZero(0.0)) << k;
    EXPECT_TRUE(ode[k].isZero(0.0)) << k;
  }
}

TEST(RiccatiK, ExampleRepresentationMatchesOde) {
  const ModelParams p = example51();
  const BlockSystem bs = assemble(p);
  const TimeGrid g(12.0, 2400);
  const MatrixSeries rep = solve_K_representation(bs.blocks, g);
  const MatrixSeries ode = solve_K_ode(bs.blocks, g);
  double worst = 0.0;
  for (int k = 0; k < g.nodes(); ++k) worst = std::max(worst, max_abs(rep[k] - ode[k]));
  EXPECT_LE(worst, 1e-6);

  // Residual written directly from the drift blocks (terminal gain is zero).
  const auto& fb = bs.blocks;
  double residual = 0.0;
  for (int k = 1; k < g.steps(); ++k) {
    const Matrix dk = (rep[k + 1] - rep[k - 1]) / (2.0 * g.dt());
    const Matrix& kk = rep[k];
    const Matrix r = dk + kk * fb.forward_state + kk * fb.forward_coupling * kk -
                     fb.backward_coupling * kk - fb.backward_state;
    residual = std::max(residual, max_abs(r));
  }
  EXPECT_LE(residual, 1e-5);
  EXPECT_LE(riccati_residual(fb, rep), 1e-5);
}

TEST(RiccatiK, ScalarToyRepresentationMatchesOde) {
  for (std::uint64_t seed : {2u, 3u, 4u}) {
    const BlockSystem bs = assemble(random_model(seed, 1, 1, 1));
    const TimeGrid g(1.0, 400);
    const MatrixSeries rep = solve_K_representation(bs.blocks, g);
    const MatrixSeries ode = solve_K_ode(bs.blocks, g);
    for (int k = 0; k < g.nodes(); ++k) EXPECT_LE(max_abs(rep[k] - ode[k]), 1e-6);
    EXPECT_LE(riccati_residual(bs.blocks, rep), 1e-5);
  }
}

TEST(RiccatiK, AsymmetryIsReported) {
  const BlockSystem bs = assemble(example51());
  const CouplingSolution cs = solve_coupling(bs, TimeGrid(12.0, 600));
  double asym = 0.0;
  for (int k = 0; k < cs.grid.nodes(); ++k)
    asym = std::max(asym, max_abs(cs.K[k] - cs.K[k].transpose()));
  EXPECT_EQ(cs.asymmetry, asym);
}

TEST(RiccatiK, OdeBlowUpIsReported) {
  // Scalar x' = y, y' = -x with K(T)=0 gives K = tan(T - t), which blows up
  // before T - t = pi/2.
  FbsdeBlocks fb;
  fb.forward_state = Matrix::Zero(1, 1);
  fb.forward_coupling = Matrix::Identity(1, 1);
  fb.backward_state = -Matrix::Identity(1, 1);
  fb.backward_coupling = Matrix::Zero(1, 1);
  fb.terminal_gain = Matrix::Zero(1, 1);
  try {
    solve_K_ode(fb, TimeGrid(2.0, 2000));
    FAIL() << "expected blow-up";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("Riccati blow-up at t="), std::string::npos);
  }
  const MatrixSeries k = solve_K_ode(fb, TimeGrid(1.0, 1000));
  EXPECT_NEAR(k[0](0, 0), std::tan(1.0), 1e-9);
}

TEST(RiccatiK, RepresentationSingularIsReported) {
  FbsdeBlocks fb;
  fb.forward_state = Matrix::Zero(1, 1);
  fb.forward_coupling = Matrix::Identity(1, 1);
  fb.backward_state = -Matrix::Identity(1, 1);
  fb.backward_coupling = Matrix::Zero(1, 1);
  fb.terminal_gain = Matrix::Zero(1, 1);
  // cos(T - t) vanishes exactly at a node.
  const double pi = std::acos(-1.0);
  EXPECT_THROW(solve_K_representation(fb, TimeGrid(pi, 2)), NumericalError);
}

TEST(RiccatiK, NonzeroTerminalGainSatisfiesSystem) {
  // Y = (K + G) X + kappa must satisfy dY = (Ahat X + Bhat Y + bhat) dt along
  // any deterministic forward path dX = (A X + B Y + b) dt, and Y(T) = G X + g.
  const ModelParams p = random_model(7);
  const BlockSystem bs = assemble(p);
  ASSERT_FALSE(bs.blocks.terminal_gain.isZero(0.0));
  const TimeGrid g(1.0, 1000);
  const CouplingSolution cs = solve_coupling(bs, g);
  const auto& fb = bs.blocks;
  std::mt19937_64 rng(70);
  const double dt = g.dt();
  for (int k : {1, 250, 500, 999}) {
    const Vector x = random_vector(rng, 5 * p.n, 1.0);
    const Vector y = cs.backward_state(k, x);
    const Vector dx = fb.forward_state * x + fb.forward_coupling * y + bs.forward_offset;
    const Matrix dk = (cs.K[k + 1] - cs.K[k - 1]) / (2.0 * dt);
    const Vector dkappa = (cs.kappa[k + 1] - cs.kappa[k - 1]) / (2.0 * dt);
    const Vector dy = dk * x + cs.feedback(k) * dx + dkappa;
    const Vector drift = fb.backward_state * x + fb.backward_coupling * y + bs.backward_offset;
    EXPECT_LT((dy - drift).cwiseAbs().maxCoeff(), 1e-4) << "node " << k;
  }
  const Vector x = random_vector(rng, 5 * p.n, 1.0);
  EXPECT_LT((cs.backward_state(g.steps(), x) -
             (fb.terminal_gain * x + bs.terminal_offset)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Kappa, ExampleIsZero) {
  const CouplingSolution cs = solve_coupling(assemble(example51()), TimeGrid(12.0, 600));
  for (int k = 0; k < cs.grid.nodes(); ++k) EXPECT_TRUE(cs.kappa[k].isZero(0.0));
}

TEST(Kappa, ZeroDynamicsKeepsTerminal) {
  std::mt19937_64 rng(8);
  FbsdeBlocks fb;
  fb.forward_state = testing::random_matrix(rng, 5, 5, 1.0);
  fb.forward_coupling = Matrix::Zero(5, 5);
  fb.backward_state = testing::random_matrix(rng, 5, 5, 1.0);
  fb.backward_coupling = Matrix::Zero(5, 5);
  fb.terminal_gain = Matrix::Zero(5, 5);
  const TimeGrid g(3.0, 30);
  const MatrixSeries k(g, std::vector<Matrix>(31, Matrix::Zero(5, 5)));
  const Vector e1 = Vector::Unit(5, 0);
  const VectorSeries kappa = solve_kappa(fb, k, zero_offsets(5), e1);
  for (int j = 0; j < g.nodes(); ++j) EXPECT_TRUE(kappa[j] == e1);
}

TEST(Kappa, GridRefinement) {
  const ModelParams p = random_model(9);
  const BlockSystem bs = assemble(p);
  auto kappa0 = [&](int steps) {
    const TimeGrid g(1.0, steps);
    return solve_kappa(bs, solve_K_representation(bs.blocks, g))[0];
  };
  const Vector coarse = kappa0(100);
  const Vector fine = kappa0(800);
  EXPECT_GT(fine.norm(), 0.1);
  EXPECT_LT((coarse - fine).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Kappa, LinearInTerminal) {
  const ModelParams p = random_model(10);
  const BlockSystem bs = assemble(p);
  const TimeGrid g(1.0, 200);
  const MatrixSeries k = solve_K_representation(bs.blocks, g);
  std::mt19937_64 rng(100);
  const Vector g1 = random_vector(rng, 5 * p.n, 1.0);
  const Vector g2 = random_vector(rng, 5 * p.n, 1.0);
  const StepOffsets zero = zero_offsets(5 * p.n);
  const VectorSeries a = solve_kappa(bs.blocks, k, zero, g1);
  const VectorSeries b = solve_kappa(bs.blocks, k, zero, g2);
  const VectorSeries ab = solve_kappa(bs.blocks, k, zero, Vector(g1 + g2));
  for (int j = 0; j < g.nodes(); ++j)
    EXPECT_LT((ab[j] - a[j] - b[j]).cwiseAbs().maxCoeff(), 1e-10);
}

// Closed form of P' = -2 a P + s P^2 - q with P(T) = 0, in tau = T - t.
double scalar_riccati(double a, double s, double q, double tau) {
  const double lambda = std::sqrt(a * a + s * q);
  const double sh = std::sinh(lambda * tau), ch = std::cosh(lambda * tau);
  return q * sh / (lambda * ch - a * sh);
}

TEST(FollowerRiccati, ExampleMatchesClosedForm) {
  const ModelParams p = example51();
  const TimeGrid g(12.0, 2400);
  const FollowerSolution fs = solve_follower_riccati(p, g);
  EXPECT_EQ(fs.pbar[g.steps()](0, 0), 0.0);
  double worst = 0.0;
  for (int k = 0; k < g.nodes(); ++k) {
    const double ref = scalar_riccati(0.05, 1.0 / 15.0, 0.9, 12.0 - g.time(k));
    worst = std::max(worst, std::abs(fs.pbar[k](0, 0) - ref));
  }
  EXPECT_LE(worst, 1e-7);
}

TEST(FollowerRiccati, ZeroWeightsGiveZero) {
  ModelParams p = zero_params(2, 1, 1);
  p.a << 0.3, 1.0, -1.0, 0.1;
  p.b << 1.0, 0.5;
  const FollowerSolution fs = solve_follower_riccati(p, TimeGrid(2.0, 100));
  for (int k = 0; k < 101; ++k) EXPECT_TRUE(fs.pbar[k].isZero(0.0));
}

TEST(FollowerRiccati, TerminalAndSymmetry) {
  const ModelParams p = random_model(11, 3, 2, 1);
  const TimeGrid g(1.0, 100);
  const FollowerSolution fs = solve_follower_riccati(p, g);
  EXPECT_TRUE(fs.pbar[g.steps()] == p.g);
  for (int k = 0; k < g.steps(); ++k) EXPECT_TRUE(fs.pbar[k] == fs.pbar[k].transpose());
}

TEST(FollowerRiccati, MonotoneInQ) {
  ModelParams p = example51();
  const TimeGrid g(12.0, 1200);
  double prev = -1.0;
  for (double q : {0.3, 0.9, 2.0}) {
    p.q(0, 0) = q;
    const double p0 = solve_follower_riccati(p, g).pbar[0](0, 0);
    EXPECT_GT(p0, prev);
    EXPECT_GE(p0, 0.0);
    prev = p0;
  }
}

TEST(PhiBar, ZeroSystem) {
  const ModelParams p = zero_params(1, 1, 1);
  const BlockSystem bs = assemble(p);
  const TimeGrid g(1.0, 10);
  const CouplingSolution cs = solve_coupling(bs, g);
  const FollowerSolution fs = solve_follower_riccati(p, g);
  for (double t : {0.0, 0.35, 1.0})
    EXPECT_TRUE(phi_bar(cs, fs, Vector::Zero(5), t).isZero(0.0));
  EXPECT_THROW(phi_bar(cs, fs, Vector::Zero(5), 1.5), DimensionError);
}

TEST(PhiBar, ExampleTerminalAndFormula) {
  const ModelParams p = example51();
  const BlockSystem bs = assemble(p);
  const TimeGrid g(12.0, 1200);
  const CouplingSolution cs = solve_coupling(bs, g);
  const FollowerSolution fs = solve_follower_riccati(p, g);
  std::mt19937_64 rng(12);
  const Vector x = random_vector(rng, 5, 1.0);
  EXPECT_EQ(phi_bar(cs, fs, x, 12.0)[0], 0.0);
  for (int k : {0, 300, 1000}) {
    const double direct = (cs.K[k] * x)[kK2] - fs.pbar[k](0, 0) * x[kXHat];
    EXPECT_NEAR(phi_bar(cs, fs, x, g.time(k))[0], direct, 1e-13);
  }
}

TEST(PhiBar, DriftResidualHasZeroMean) {
  // Along simulated mean-field paths, the increment of phi over one step
  // should match its drift in conditional mean.
  const ModelParams p = example51();
  const BlockSystem bs = assemble(p);
  const TimeGrid g(12.0, 1200);
  const CouplingSolution cs = solve_coupling(bs, g);
  const FollowerSolution fs = solve_follower_riccati(p, g);
  const double dt = g.dt();
  const double s = 1.0 / 15.0;
  const double a = 0.05, c = 0.05, f = 0.3, c0 = 0.01;
  const double theta = 0.1, theta1 = 1.0, theta0 = 1.0, q = 0.9, q0 = 1.0;
  const std::vector<int> nodes{100, 600, 1100};
  const int paths = 10000;
  std::vector<double> sum(nodes.size(), 0.0), sum_sq(nodes.size(), 0.0);
  for (int run = 0; run < paths; ++run) {
    const MeanFieldPath mf =
        sample_mean_field_path(bs, cs, p, g, 31, static_cast<std::uint32_t>(run));
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const int k = nodes[j];
      const double xh = mf.block(k, kXHat)[0], xb0 = mf.block(k, kXBar0)[0];
      const double k1 = mf.block(k, kK1)[0], k2 = mf.block(k, kK2)[0];
      const double pb = fs.pbar[k](0, 0);
      const double phi = phi_bar(cs, fs, mf.x.col(k), g.time(k))[0];
      const double phi_next = phi_bar(cs, fs, mf.x.col(k + 1), g.time(k + 1))[0];
      const double psi1 = xb0 - theta0 * xh;
      const double psi3 = (1.0 - theta) * xh - theta1 * xb0;
      const double chi1 = -q * (theta * xh + theta1 * xb0) - theta * q * psi3 -
                          p.alpha * theta0 * q0 * psi1 + c0 * k1 + c * k2;
      const double r = (phi_next - phi) / dt + (a - pb * s) * phi + chi1 +
                       pb * c * xh + pb * f * xb0;
      sum[j] += r;
      sum_sq[j] += r * r;
    }
  }
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double mean = sum[j] / paths;
    const double var = (sum_sq[j] - paths * mean * mean) / (paths - 1);
    const double se = std::sqrt(var / paths);
    EXPECT_LE(std::abs(mean), 3.0 * se) << "node " << nodes[j] << " se " << se;
  }
}

}  // namespace
}  // namespace lfmf
