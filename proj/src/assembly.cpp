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

#include "lfmf/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lfmf {

namespace {

class BlockBuilder {
 public:
  BlockBuilder(int blocks, int n) : n_(n), m_(Matrix::Zero(blocks * n, blocks * n)) {}

  BlockBuilder& set(int row, int col, const Matrix& value) {
    m_.block(row * n_, col * n_, n_, n_) = value;
    return *this;
  }

  Matrix take() { return std::move(m_); }

 private:
  int n_;
  Matrix m_;
};

Vector stack(std::initializer_list<Vector> parts) {
  Eigen::Index size = 0;
  for (const auto& v : parts) size += v.size();
  Vector out(size);
  Eigen::Index pos = 0;
  for (const auto& v : parts) {
    out.segment(pos, v.size()) = v;
    pos += v.size();
  }
  return out;
}

}  // namespace

Matrix FbsdeBlocks::coupled_drift() const {
  const auto k = forward_state.rows();
  const Matrix& g = terminal_gain;
  Matrix out(2 * k, 2 * k);
  out.topLeftCorner(k, k) = forward_state + forward_coupling * g;
  out.topRightCorner(k, k) = forward_coupling;
  out.bottomLeftCorner(k, k) = backward_state - g * forward_state +
                               backward_coupling * g -
                               g * forward_coupling * g;
  out.bottomRightCorner(k, k) = backward_coupling - g * forward_coupling;
  return out;
}

BlockSystem assemble_blocks(const ModelParams& p, const XiTerms& xi,
                            const AssemblyOptions& options) {
  const int n = p.n;
  const Matrix id = Matrix::Identity(n, n);
  const Matrix s = follower_control_gain(p);
  const Matrix s0 = leader_control_gain(p);
  const Matrix ac = p.a + p.c;

  FbsdeBlocks fb;
  fb.forward_state = BlockBuilder(5, n)
                         .set(kXHat, kXHat, ac).set(kXHat, kXBar0, p.f)
                         .set(kXBar0, kXHat, p.c0).set(kXBar0, kXBar0, p.a0)
                         .set(kQ, kQ, p.a)
                         .set(kL1, kQ, -p.c0).set(kL1, kL1, p.a0).set(kL1, kL2, p.c0)
                         .set(kL2, kQ, -p.c).set(kL2, kL1, p.f).set(kL2, kL2, ac)
                         .take();
  fb.forward_coupling = BlockBuilder(5, n)
                            .set(kXHat, kK2, -s)
                            .set(kXBar0, kY0, -s0)
                            .set(kQ, kY, s).set(kQ, kK2, -s)
                            .set(kL2, kYHat, -s)
                            .take();

  const Matrix q_i_theta = p.q * (id - p.theta);
  const Matrix q_theta1 = p.q * p.theta1;
  const Matrix q_coupling = options.q_coupling == QCoupling::kSum
                                ? Matrix(-(xi.xi1 + p.q).transpose())
                                : Matrix(-(xi.xi1 - p.q).transpose());
  const Matrix xi2t = xi.xi2.transpose();
  fb.backward_state = BlockBuilder(5, n)
                          .set(kY, kXHat, -q_i_theta).set(kY, kXBar0, q_theta1)
                          .set(kY, kQ, p.q.transpose())
                          .set(kYHat, kXHat, xi.xi1 - q_i_theta)
                          .set(kYHat, kXBar0, -xi.xi2 + q_theta1)
                          .set(kYHat, kQ, q_coupling)
                          .set(kYHat, kL1, xi.xi2)
                          .set(kYHat, kL2, -xi.xi1.transpose())
                          .set(kY0, kXHat, xi2t).set(kY0, kXBar0, -xi.xi4)
                          .set(kY0, kQ, -xi2t).set(kY0, kL1, xi.xi4.transpose())
                          .set(kY0, kL2, -xi2t)
                          .set(kK1, kXHat, xi2t).set(kK1, kXBar0, -xi.xi4)
                          .set(kK2, kXHat, -xi.xi1).set(kK2, kXBar0, xi.xi2)
                          .take();
  fb.backward_coupling = BlockBuilder(5, n)
                             .set(kY, kY, -p.a.transpose())
                             .set(kYHat, kY, p.c.transpose())
                             .set(kYHat, kYHat, -ac.transpose())
                             .set(kYHat, kY0, p.c0.transpose())
                             .set(kY0, kY, -p.f.transpose())
                             .set(kY0, kYHat, p.f.transpose())
                             .set(kY0, kY0, -p.a0.transpose())
                             .set(kK1, kK1, -p.a0.transpose())
                             .set(kK1, kK2, -p.f.transpose())
                             .set(kK2, kK1, -p.c0.transpose())
                             .set(kK2, kK2, -ac.transpose())
                             .take();

  const Matrix g_i_theta = p.g * (id - p.theta_hat);
  const Matrix g_theta1 = p.g * p.theta_hat1;
  const Matrix xi2gt = xi.xi2_g.transpose();
  fb.terminal_gain = BlockBuilder(5, n)
                         .set(kY, kXHat, g_i_theta).set(kY, kXBar0, -g_theta1)
                         .set(kY, kQ, -p.g)
                         .set(kYHat, kXHat, -xi.xi1_g + g_i_theta)
                         .set(kYHat, kXBar0, xi.xi2_g - g_theta1)
                         .set(kYHat, kQ, (xi.xi1_g - p.g).transpose())
                         .set(kYHat, kL1, -xi2gt)
                         .set(kYHat, kL2, xi.xi1_g.transpose())
                         .set(kY0, kXHat, -xi2gt).set(kY0, kXBar0, xi.xi4_g)
                         .set(kY0, kQ, xi2gt).set(kY0, kL1, -xi.xi4_g.transpose())
                         .set(kY0, kL2, xi2gt)
                         .set(kK1, kXHat, -xi2gt).set(kK1, kXBar0, xi.xi4_g)
                         .set(kK2, kXHat, xi.xi1_g).set(kK2, kXBar0, -xi.xi2_g)
                         .take();

  BlockSystem bs;
  bs.n = n;
  bs.forward_offset = Vector::Zero(5 * n);
  bs.forward_noise = Matrix::Zero(5 * n, p.d);
  bs.forward_noise.block(kXBar0 * n, 0, n, p.d) = p.d0;
  const Vector q_eta = p.q * p.eta;
  bs.backward_offset = stack({q_eta, Vector(-xi.xi3 + q_eta), Vector(-xi.xi5),
                              Vector(-xi.xi5), xi.xi3});
  const Vector g_eta = p.g * p.eta_hat;
  bs.terminal_offset = stack({Vector(-g_eta), Vector(xi.xi3_g - g_eta), xi.xi5_g,
                              xi.xi5_g, Vector(-xi.xi3_g)});
  bs.coupled_drift = fb.coupled_drift();
  bs.coupled_offset = stack({bs.forward_offset,
                             Vector(bs.backward_offset -
                                    fb.terminal_gain * bs.forward_offset)});
  bs.blocks = std::move(fb);
  return bs;
}

FbsdeBlocks follower_response_blocks(const ModelParams& p, const XiTerms& xi) {
  const int n = p.n;
  const Matrix s = follower_control_gain(p);
  const Matrix ac = p.a + p.c;
  FbsdeBlocks fb;
  // Forward (xhat, xbar0), backward (k1, k2).
  fb.forward_state = BlockBuilder(2, n)
                         .set(0, 0, ac).set(0, 1, p.f)
                         .set(1, 0, p.c0).set(1, 1, p.a0)
                         .take();
  fb.forward_coupling = BlockBuilder(2, n).set(0, 1, -s).take();
  fb.backward_state = BlockBuilder(2, n)
                          .set(0, 0, xi.xi2.transpose()).set(0, 1, -xi.xi4)
                          .set(1, 0, -xi.xi1).set(1, 1, xi.xi2)
                          .take();
  fb.backward_coupling = BlockBuilder(2, n)
                             .set(0, 0, -p.a0.transpose()).set(0, 1, -p.f.transpose())
                             .set(1, 0, -p.c0.transpose()).set(1, 1, -ac.transpose())
                             .take();
  fb.terminal_gain = BlockBuilder(2, n)
                         .set(0, 0, -xi.xi2_g.transpose()).set(0, 1, xi.xi4_g)
                         .set(1, 0, xi.xi1_g).set(1, 1, -xi.xi2_g)
                         .take();
  return fb;
}

double coupling_determinant(const Matrix& coupled_drift, double t) {
  const auto k = coupled_drift.rows() / 2;
  const Matrix e = matrix_exponential(coupled_drift * t);
  return e.bottomRightCorner(k, k).determinant();
}

SolvabilityReport solvability_scan(const BlockSystem& system,
                                   const TimeGrid& grid, double threshold) {
  SolvabilityReport report{grid, {}, std::numeric_limits<double>::infinity(),
                           threshold, true};
  report.det_values.reserve(static_cast<std::size_t>(grid.nodes()));
  for (int k = 0; k < grid.nodes(); ++k) {
    const double det = coupling_determinant(system.coupled_drift, grid.time(k));
    if (!std::isfinite(det)) {
      throw NumericalError("non-finite coupling determinant at t=" +
                           std::to_string(grid.time(k)));
    }
    report.det_values.push_back(det);
    report.min_det = std::min(report.min_det, det);
  }
  report.passed = report.min_det > threshold;
  return report;
}

}  // namespace lfmf
