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

#include "lfmf/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace lfmf {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kEigenTol = 1e-10;

void expect_shape(const Matrix& mat, Eigen::Index rows, Eigen::Index cols,
                  const char* name) {
  if (mat.rows() != rows || mat.cols() != cols) {
    throw DimensionError(std::string("shape error: ") + name + " is " +
                         std::to_string(mat.rows()) + "x" +
                         std::to_string(mat.cols()) + ", expected " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  if (!mat.allFinite()) {
    throw ValidationError(std::string("non-finite entry in ") + name);
  }
}

void expect_size(const Vector& v, Eigen::Index size, const char* name) {
  if (v.size() != size) {
    throw DimensionError(std::string("shape error: ") + name + " has length " +
                         std::to_string(v.size()) + ", expected " +
                         std::to_string(size));
  }
  if (!v.allFinite()) {
    throw ValidationError(std::string("non-finite entry in ") + name);
  }
}

void expect_symmetric(const Matrix& w, const char* name) {
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw ValidationError(std::string("weight not symmetric: ") + name);
  }
}

double min_eigenvalue(const Matrix& w) {
  const Matrix sym = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void expect_psd(const Matrix& w, const char* name) {
  expect_symmetric(w, name);
  if (min_eigenvalue(w) < -kEigenTol) {
    throw ValidationError(std::string("weight not positive semidefinite: ") + name);
  }
}

void expect_uniformly_positive(const Matrix& w, double delta, const char* name) {
  expect_symmetric(w, name);
  if (!(min_eigenvalue(w) > delta)) {
    throw ValidationError(std::string("R not uniformly positive: ") + name);
  }
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }
Vector scalar_vec(double v) { return Vector::Constant(1, v); }

}  // namespace

ModelParams zero_params(int n, int m, int d) {
  ModelParams p;
  p.n = n;
  p.m = m;
  p.d = d;
  const auto nn = Matrix::Zero(n, n);
  p.a0 = nn; p.c0 = nn; p.a = nn; p.c = nn; p.f = nn;
  p.b0 = Matrix::Zero(n, m);
  p.b = Matrix::Zero(n, m);
  p.d0 = Matrix::Zero(n, d);
  p.d_noise = Matrix::Zero(n, d);
  p.q0 = nn; p.g0 = nn; p.theta0 = nn; p.theta_hat0 = nn;
  p.q = nn; p.g = nn; p.theta = nn; p.theta1 = nn; p.theta_hat = nn;
  p.theta_hat1 = nn;
  p.r0 = Matrix::Identity(m, m);
  p.r = Matrix::Identity(m, m);
  p.eta0 = Vector::Zero(n); p.eta_hat0 = Vector::Zero(n);
  p.eta = Vector::Zero(n); p.eta_hat = Vector::Zero(n);
  p.alpha = 1.0;
  p.horizon = 1.0;
  p.xi0_mean = Vector::Zero(n); p.xi0_std = Vector::Zero(n);
  p.xi_mean = Vector::Zero(n); p.xi_std = Vector::Zero(n);
  return p;
}

ModelParams example51() {
  ModelParams p = zero_params(1, 1, 1);
  p.a0 = scalar(0.1);
  p.b0 = scalar(1.0);
  p.c0 = scalar(0.01);
  p.d0 = scalar(1.0);
  p.a = scalar(0.05);
  p.b = scalar(1.0);
  p.c = scalar(0.05);
  p.d_noise = scalar(1.0);
  p.f = scalar(0.3);
  p.theta0 = scalar(1.0);
  p.q0 = scalar(1.0);
  p.r0 = scalar(10.0);
  p.g0 = scalar(0.0);
  p.theta = scalar(0.1);
  p.theta1 = scalar(1.0);
  p.q = scalar(0.9);
  p.r = scalar(15.0);
  p.g = scalar(0.0);
  p.alpha = 1.02;
  p.horizon = 12.0;
  p.xi0_mean = scalar_vec(0.0);
  p.xi0_std = scalar_vec(1.0);
  p.xi_mean = scalar_vec(0.0);
  p.xi_std = scalar_vec(1.0);
  return p;
}

ModelParams validate_params(const ModelParams& p, double delta) {
  if (p.n < 1 || p.m < 1 || p.d < 1) {
    throw DimensionError("shape error: dimensions must be positive");
  }
  const Eigen::Index n = p.n, m = p.m, d = p.d;
  expect_shape(p.a0, n, n, "A0");
  expect_shape(p.b0, n, m, "B0");
  expect_shape(p.c0, n, n, "C0");
  expect_shape(p.d0, n, d, "D0");
  expect_shape(p.a, n, n, "A");
  expect_shape(p.b, n, m, "B");
  expect_shape(p.c, n, n, "C");
  expect_shape(p.d_noise, n, d, "D");
  expect_shape(p.f, n, n, "F");
  expect_shape(p.q0, n, n, "Q0");
  expect_shape(p.g0, n, n, "G0");
  expect_shape(p.r0, m, m, "R0");
  expect_shape(p.theta0, n, n, "Theta0");
  expect_shape(p.theta_hat0, n, n, "ThetaHat0");
  expect_shape(p.q, n, n, "Q");
  expect_shape(p.g, n, n, "G");
  expect_shape(p.r, m, m, "R");
  expect_shape(p.theta, n, n, "Theta");
  expect_shape(p.theta1, n, n, "Theta1");
  expect_shape(p.theta_hat, n, n, "ThetaHat");
  expect_shape(p.theta_hat1, n, n, "ThetaHat1");
  expect_size(p.eta0, n, "eta0");
  expect_size(p.eta_hat0, n, "etaHat0");
  expect_size(p.eta, n, "eta");
  expect_size(p.eta_hat, n, "etaHat");
  expect_size(p.xi0_mean, n, "xi0_mean");
  expect_size(p.xi0_std, n, "xi0_std");
  expect_size(p.xi_mean, n, "xiHat");
  expect_size(p.xi_std, n, "xi_std");

  expect_psd(p.q0, "Q0");
  expect_psd(p.q, "Q");
  expect_psd(p.g0, "G0");
  expect_psd(p.g, "G");
  expect_uniformly_positive(p.r0, delta, "R0");
  expect_uniformly_positive(p.r, delta, "R");

  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha)) {
    throw ValidationError("alpha must be positive");
  }
  if (!(p.horizon > 0.0) || !std::isfinite(p.horizon)) {
    throw ValidationError("horizon T must be positive");
  }
  if ((p.xi0_std.array() < 0.0).any() || (p.xi_std.array() < 0.0).any()) {
    throw ValidationError("initial-law standard deviations must be nonnegative");
  }
  return p;
}

XiTerms compute_xi_terms(const ModelParams& p) {
  const Matrix id = Matrix::Identity(p.n, p.n);
  const Matrix i_theta = id - p.theta;
  const Matrix i_theta_hat = id - p.theta_hat;
  const double al = p.alpha;

  XiTerms x;
  x.xi1 = i_theta.transpose() * p.q * i_theta +
          al * p.theta0.transpose() * p.q0 * p.theta0;
  x.xi2 = i_theta.transpose() * p.q * p.theta1 + al * p.theta0.transpose() * p.q0;
  x.xi3 = i_theta.transpose() * p.q * p.eta - al * p.theta0.transpose() * p.q0 * p.eta0;
  x.xi4 = p.theta1.transpose() * p.q * p.theta1 + al * p.q0;
  x.xi5 = p.theta1.transpose() * p.q * p.eta - al * p.q0 * p.eta0;

  x.xi1_g = i_theta_hat.transpose() * p.g * i_theta_hat +
            al * p.theta_hat0.transpose() * p.g0 * p.theta_hat0;
  x.xi2_g = i_theta_hat.transpose() * p.g * p.theta_hat1 +
            al * p.theta_hat0.transpose() * p.g0;
  x.xi3_g = i_theta_hat.transpose() * p.g * p.eta_hat -
            al * p.theta_hat0.transpose() * p.g0 * p.eta_hat0;
  x.xi4_g = p.theta_hat1.transpose() * p.g * p.theta_hat1 + al * p.g0;
  x.xi5_g = p.theta_hat1.transpose() * p.g * p.eta_hat - al * p.g0 * p.eta_hat0;
  return x;
}

Matrix follower_control_gain(const ModelParams& p) {
  return p.b * p.r.llt().solve(p.b.transpose());
}

Matrix leader_control_gain(const ModelParams& p) {
  return p.b0 * (p.alpha * p.r0).llt().solve(p.b0.transpose());
}

}  // namespace lfmf
