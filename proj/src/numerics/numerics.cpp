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

#include "lfmf/numerics.hpp"

#include <cmath>
#include <string>

namespace lfmf {

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

Matrix make_matrix(std::size_t rows, std::size_t cols,
                   std::span<const double> row_major) {
  if (rows * cols != row_major.size()) {
    throw DimensionError("matrix: expected " + std::to_string(rows * cols) +
                         " entries, got " + std::to_string(row_major.size()));
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = row_major[r * cols + c];
      if (!std::isfinite(v)) throw DimensionError("matrix: non-finite entry");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return m;
}

TimeGrid::TimeGrid(double horizon, int steps)
    : horizon_(horizon), steps_(steps), dt_(horizon / steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DimensionError("time grid: horizon must be positive");
  }
  if (steps < 2) throw DimensionError("time grid: need at least 2 steps");
}

std::pair<int, double> TimeGrid::locate(double t) const {
  if (!(t >= 0.0) || t > horizon_ * (1.0 + 1e-12)) {
    throw DimensionError("time " + std::to_string(t) + " outside [0, " +
                         std::to_string(horizon_) + "]");
  }
  const double pos = t / dt_;
  int k = static_cast<int>(std::floor(pos));
  if (k >= steps_) return {steps_, 0.0};
  double frac = pos - k;
  if (frac < 0.0) frac = 0.0;
  return {k, frac};
}

VectorSeries integrate_linear_ode_backward(const AffineRhs& rhs,
                                           const Vector& terminal,
                                           const TimeGrid& grid) {
  const Eigen::Index dim = terminal.size();
  auto f = [&](double t, const Vector& v) -> Vector {
    const Matrix coef = rhs.coef(t);
    const Vector src = rhs.src(t);
    if (coef.rows() != dim || coef.cols() != dim || src.size() != dim) {
      throw DimensionError("linear ode: coefficient shape does not match state");
    }
    return coef * v + src;
  };
  std::vector<Vector> values(static_cast<std::size_t>(grid.nodes()));
  values.back() = terminal;
  for (int k = grid.steps(); k > 0; --k) {
    values[static_cast<std::size_t>(k) - 1] =
        rk4_step(f, grid.time(k), values[static_cast<std::size_t>(k)], -grid.dt());
  }
  return VectorSeries(grid, std::move(values));
}

SlopeFit loglog_slope(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw std::invalid_argument("loglog_slope: need at least 2 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) {
      throw std::invalid_argument("loglog_slope: non-positive data");
    }
    sx += std::log(x);
    sy += std::log(y);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("loglog_slope: all x identical");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace lfmf
