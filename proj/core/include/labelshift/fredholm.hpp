// Copyright 2026 The labelshift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "labelshift/detector.hpp"

namespace labelshift {

// Gauss-Legendre nodes and weights on [a, b].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Expected stopping time v(x) of R_t = Psi(R_{t-1}) * lambda(X_t) started at
// R_0 = x, where lambda(X) has density `lr_density` on (0, inf):
//   v(x) = 1 + int_0^A v(y) f(y / Psi(x)) / Psi(x) dy.
struct FredholmProblem {
  std::function<double(double)> lr_density;
  UpdateRule rule = UpdateRule::Cusum;
  double threshold = 2.0;
  int n_nodes = 64;
  // Interval carrying the density, used for the unit-mass check. Without it
  // the mass is integrated in log-space over s in [e^-60, e^60].
  std::optional<std::pair<double, double>> support;
};

// Nystrom solution on [0, A]. Nodes are Gauss-Legendre in log y on two
// panels meeting at y = 1; the part of [0, A] where the density carries less
// than 1e-12 mass is dropped.
class FredholmSolution {
 public:
  FredholmSolution(FredholmProblem problem, QuadratureRule grid, std::vector<double> values);
  // Nystrom interpolant at an arbitrary starting value.
  double operator()(double init_x) const;
  const QuadratureRule& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

 private:
  FredholmProblem problem_;
  QuadratureRule grid_;
  std::vector<double> values_;
};

// Throws InputError for n_nodes < 16, A <= 0, a negative density value or a
// density whose mass differs from 1 by more than 1e-3; NumericalError if the
// linear solve fails or leaves a residual above 1e-8.
FredholmSolution solve_fredholm(const FredholmProblem& problem);

inline double fredholm_expected_stopping(const FredholmProblem& problem, double init_x) {
  return solve_fredholm(problem)(init_x);
}

// Densities of lambda(X) = exp(mu X - mu^2/2) for X ~ N(0,1) (pre-change) and
// X ~ N(mu,1) (post-change).
double gaussian_shift_lr_density_pre(double s, double mu);
double gaussian_shift_lr_density_post(double s, double mu);

}  // namespace labelshift
