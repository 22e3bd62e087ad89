// Copyright 2026 The netnl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense phase-1 simplex for small feasibility problems {x >= 0 : A x = b}.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

#include "netnl/errors.hpp"

namespace netnl::simplex {

inline constexpr double kPivotTol = 1e-9;

struct FeasibilityResult {
  bool feasible = false;
  std::vector<double> x;     // primal point, when feasible
  std::vector<double> dual;  // y with A^T y <= 0 and b.y = infeasibility, when infeasible
  double infeasibility = 0.0;
  std::size_t pivots = 0;
};

/// Solves the phase-1 problem min 1.s subject to A x + s = b, x, s >= 0 with Bland's rule.
///
/// `a` is row-major with `rows` rows. The problem is feasible when the optimum is at most
/// `feasibility_tol`. On infeasibility the optimal phase-1 dual is a Farkas certificate.
inline FeasibilityResult solve_feasibility(const std::vector<double>& a, std::size_t rows, std::size_t cols,
                                           const std::vector<double>& b, double feasibility_tol = 1e-9,
                                           std::size_t max_pivots = 200000) {
  if (a.size() != rows * cols || b.size() != rows) throw DimensionError("solve_feasibility: shape mismatch");
  const std::size_t width = cols + rows + 1;  // structural, artificial, rhs
  const std::size_t rhs = cols + rows;
  std::vector<double> t((rows + 1) * width, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return t[i * width + j]; };
  std::vector<double> flip(rows, 1.0);
  std::vector<std::size_t> basis(rows);

  for (std::size_t i = 0; i < rows; ++i) {
    flip[i] = b[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < cols; ++j) at(i, j) = flip[i] * a[i * cols + j];
    at(i, cols + i) = 1.0;
    at(i, rhs) = flip[i] * b[i];
    basis[i] = cols + i;
  }
  // Reduced costs of the phase-1 objective; the last entry holds -objective.
  for (std::size_t j = 0; j < width; ++j) {
    if (j >= cols && j < rhs) continue;
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += at(i, j);
    at(rows, j) = -s;
  }

  FeasibilityResult result;
  for (;;) {
    std::size_t enter = width;
    for (std::size_t j = 0; j < rhs; ++j)
      if (at(rows, j) < -kPivotTol) {
        enter = j;
        break;
      }
    if (enter == width) break;

    std::size_t leave = rows;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows; ++i) {
      const double coef = at(i, enter);
      if (coef <= kPivotTol) continue;
      const double ratio = at(i, rhs) / coef;
      if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && leave < rows && basis[i] < basis[leave])) {
        best = ratio;
        leave = i;
      }
    }
    if (leave == rows) {
      // Phase-1 is bounded below by zero, so an unbounded direction means numerical breakdown.
      std::ostringstream msg;
      msg << "solve_feasibility: unbounded phase-1 direction at column " << enter << " after " << result.pivots
          << " pivots (reduced cost " << at(rows, enter) << ")";
      throw SolverError(msg.str());
    }

    const double pivot = at(leave, enter);
    for (std::size_t j = 0; j < width; ++j) at(leave, j) /= pivot;
    for (std::size_t i = 0; i <= rows; ++i) {
      if (i == leave) continue;
      const double f = at(i, enter);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) at(i, j) -= f * at(leave, j);
    }
    basis[leave] = enter;
    if (++result.pivots > max_pivots) {
      std::ostringstream msg;
      msg << "solve_feasibility: pivot limit " << max_pivots << " reached; current infeasibility " << -at(rows, rhs);
      throw SolverError(msg.str());
    }
  }

  result.infeasibility = -at(rows, rhs);
  result.feasible = result.infeasibility <= feasibility_tol;
  if (result.feasible) {
    result.x.assign(cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
      if (basis[i] < cols) result.x[basis[i]] = std::max(0.0, at(i, rhs));
  } else {
    // Reduced cost of artificial i is 1 - y_i; undo the row sign flips.
    result.dual.assign(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) result.dual[i] = flip[i] * (1.0 - at(rows, cols + i));
  }
  return result;
}

}  // namespace netnl::simplex
