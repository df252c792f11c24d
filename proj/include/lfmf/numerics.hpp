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

// Dense small-matrix utilities shared by every solver: the time grid, gridded
// functions, the matrix exponential, fixed-step RK4, and log-log regression.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "lfmf/errors.hpp"

namespace lfmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);

// Builds a matrix from row-major entries; rejects size mismatch and NaN/Inf.
Matrix make_matrix(std::size_t rows, std::size_t cols,
                   std::span<const double> row_major);

// Uniform grid on [0, T] with M steps. Node k sits at k * dt.
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps);

  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  int nodes() const { return steps_ + 1; }
  double dt() const { return dt_; }
  double time(int k) const { return k * dt_; }

  // Index of the step containing t and the fractional position inside it.
  std::pair<int, double> locate(double t) const;

  bool operator==(const TimeGrid& other) const {
    return horizon_ == other.horizon_ && steps_ == other.steps_;
  }

 private:
  double horizon_;
  int steps_;
  double dt_;
};

// A function of time sampled at every node of a grid.
template <class T>
class GridSeries {
 public:
  GridSeries(TimeGrid grid, std::vector<T> values)
      : grid_(grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.nodes()) {
      throw DimensionError("grid series: value count does not match nodes");
    }
  }

  const TimeGrid& grid() const { return grid_; }
  const T& operator[](int k) const { return values_[static_cast<std::size_t>(k)]; }
  T& operator[](int k) { return values_[static_cast<std::size_t>(k)]; }
  const std::vector<T>& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }

  // Linear interpolation between neighbouring nodes.
  T at(double t) const {
    const auto [k, frac] = grid_.locate(t);
    if (frac == 0.0) return values_[static_cast<std::size_t>(k)];
    const T& lo = values_[static_cast<std::size_t>(k)];
    const T& hi = values_[static_cast<std::size_t>(k) + 1];
    return T(lo + frac * (hi - lo));
  }

 private:
  TimeGrid grid_;
  std::vector<T> values_;
};

using MatrixSeries = GridSeries<Matrix>;
using VectorSeries = GridSeries<Vector>;

// e^A by scaling and squaring with a degree-13 Pade approximant.
Matrix matrix_exponential(const Matrix& a);

// One classical RK4 step of y' = f(t, y) with (possibly negative) step h.
template <class State, class Rhs>
State rk4_step(Rhs& f, double t, const State& y, double h) {
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
  const State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
  const State k4 = f(t + h, State(y + h * k3));
  return State(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

struct AffineRhs {
  std::function<Matrix(double)> coef;
  std::function<Vector(double)> src;
};

// Solves v'(t) = coef(t) v + src(t) backward from v(T) = terminal with RK4.
// coef and src are evaluated at nodes and step midpoints.
VectorSeries integrate_linear_ode_backward(const AffineRhs& rhs,
                                           const Vector& terminal,
                                           const TimeGrid& grid);

struct SlopeFit {
  double slope;
  double intercept;
};

// Ordinary least squares of ln y against ln x.
SlopeFit loglog_slope(std::span<const std::pair<double, double>> points);

}  // namespace lfmf
