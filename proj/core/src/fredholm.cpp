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

#include "labelshift/fredholm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "labelshift/errors.hpp"
#include "labelshift/stats.hpp"

namespace labelshift {

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw InputError("Gauss-Legendre rule needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / dp;
      z -= step;
      if (std::abs(step) < 1e-15) break;
    }
    {
      // Derivative at the converged root.
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = mid - half * z;
    rule.nodes[n - 1 - i] = mid + half * z;
    rule.weights[i] = rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

namespace {

void append(QuadratureRule& into, const QuadratureRule& part) {
  into.nodes.insert(into.nodes.end(), part.nodes.begin(), part.nodes.end());
  into.weights.insert(into.weights.end(), part.weights.begin(), part.weights.end());
}

// Gauss-Legendre in u = log y over [log y_min, log A], split at y = 1 where
// the CUSUM solution has its kink. dy = e^u du is folded into the weights.
QuadratureRule build_grid(double y_min, double threshold, int n_nodes) {
  const double lo = std::log(y_min);
  const double hi = std::log(threshold);
  std::vector<std::pair<double, double>> panels;
  if (lo < 0.0 && hi > 0.0) {
    panels = {{lo, 0.0}, {0.0, hi}};
  } else {
    panels = {{std::min(lo, hi - 1.0), hi}};
  }
  QuadratureRule grid;
  int remaining = n_nodes;
  const double total = panels.back().second - panels.front().first;
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto [a, b] = panels[p];
    int count = remaining;
    if (p + 1 < panels.size()) {
      count = std::clamp(static_cast<int>(std::lround(n_nodes * (b - a) / total)), 8,
                         n_nodes - 8);
    }
    remaining -= count;
    QuadratureRule part = gauss_legendre(count, a, b);
    for (std::size_t i = 0; i < part.nodes.size(); ++i) {
      part.nodes[i] = std::exp(part.nodes[i]);
      part.weights[i] *= part.nodes[i];
    }
    append(grid, part);
  }
  return grid;
}

struct MassScan {
  double mass = 0.0;
  double y_min = 0.0;  // the density carries at most 1e-12 below it
};

// Composite 12-point Gauss-Legendre over `panels` equal pieces of [lo, hi]
// in coordinate c, where y = to_y(c) and jac(c) = dy/dc.
template <class ToY, class Jac>
MassScan integrate_mass(const FredholmProblem& problem, double lo, double hi, int panels,
                        ToY to_y, Jac jac) {
  constexpr double kNegligible = 1e-12;
  const QuadratureRule unit = gauss_legendre(12);
  const double width = (hi - lo) / panels;
  CompensatedSum mass;
  MassScan out;
  bool found = false;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * width;
    for (std::size_t i = 0; i < unit.nodes.size(); ++i) {
      const double c = a + 0.5 * width * (unit.nodes[i] + 1.0);
      mass.add(0.5 * width * unit.weights[i] * problem.lr_density(to_y(c)) * jac(c));
    }
    if (!found && mass.value() > kNegligible) {
      found = true;
      out.y_min = to_y(a);
    }
  }
  if (!found) out.y_min = to_y(hi);
  out.mass = mass.value();
  return out;
}

MassScan scan_density(const FredholmProblem& problem) {
  if (problem.support) {
    const auto [lo, hi] = *problem.support;
    if (!(lo >= 0.0 && hi > lo)) throw InputError("density support must satisfy 0 <= lo < hi");
    MassScan out = integrate_mass(
        problem, lo, hi, 256, [](double y) { return y; }, [](double) { return 1.0; });
    out.y_min = std::max(out.y_min, 1e-12);
    return out;
  }
  auto ex = [](double u) { return std::exp(u); };
  return integrate_mass(problem, -60.0, 60.0, 480, ex, ex);
}

double kernel(const FredholmProblem& problem, double x, double y) {
  const double psi = apply_update_rule(problem.rule, x);
  return problem.lr_density(y / psi) / psi;
}

}  // namespace

FredholmSolution::FredholmSolution(FredholmProblem problem, QuadratureRule grid,
                                   std::vector<double> values)
    : problem_(std::move(problem)), grid_(std::move(grid)), values_(std::move(values)) {}

double FredholmSolution::operator()(double init_x) const {
  if (!(init_x >= 0.0) || !std::isfinite(init_x)) {
    throw InputError("initial statistic must be finite and nonnegative");
  }
  CompensatedSum v;
  v.add(1.0);
  for (std::size_t j = 0; j < values_.size(); ++j) {
    v.add(grid_.weights[j] * kernel(problem_, init_x, grid_.nodes[j]) * values_[j]);
  }
  return v.value();
}

FredholmSolution solve_fredholm(const FredholmProblem& problem) {
  if (!problem.lr_density) throw InputError("likelihood-ratio density is not set");
  if (problem.n_nodes < 16) {
    throw InputError("at least 16 quadrature nodes are required, got " +
                     std::to_string(problem.n_nodes));
  }
  if (!(problem.threshold > 0.0) || !std::isfinite(problem.threshold)) {
    throw InputError("threshold must be finite and positive");
  }
  const MassScan scan = scan_density(problem);
  const double mass = scan.mass;
  if (!(std::abs(mass - 1.0) <= 1e-3)) {
    throw InputError("likelihood-ratio density integrates to " + std::to_string(mass) +
                     ", expected 1 within 1e-3");
  }

  QuadratureRule grid = build_grid(scan.y_min, problem.threshold, problem.n_nodes);
  const auto n = static_cast<Eigen::Index>(grid.nodes.size());
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double k = kernel(problem, grid.nodes[i], grid.nodes[j]);
      if (!(k >= 0.0) || !std::isfinite(k)) {
        throw InputError("likelihood-ratio density returned a negative or non-finite value");
      }
      system(i, j) -= grid.weights[j] * k;
    }
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  const Eigen::VectorXd v = lu.solve(ones);
  if (!v.allFinite()) throw NumericalError("Fredholm system is singular");
  const double residual = (system * v - ones).lpNorm<Eigen::Infinity>();
  if (!(residual <= 1e-8 * std::max(1.0, v.lpNorm<Eigen::Infinity>()))) {
    throw NumericalError("Fredholm solve residual " + std::to_string(residual) +
                         " exceeds 1e-8; the system is ill-conditioned");
  }
  return FredholmSolution(problem, std::move(grid), std::vector<double>(v.begin(), v.end()));
}

namespace {
double lognormal_density(double s, double location, double scale) {
  if (!(s > 0.0)) return 0.0;
  const double z = (std::log(s) - location) / scale;
  return std::exp(-0.5 * z * z) / (scale * s * std::sqrt(2.0 * std::numbers::pi));
}
}  // namespace

double gaussian_shift_lr_density_pre(double s, double mu) {
  return lognormal_density(s, -0.5 * mu * mu, std::abs(mu));
}

double gaussian_shift_lr_density_post(double s, double mu) {
  return lognormal_density(s, 0.5 * mu * mu, std::abs(mu));
}

}  // namespace labelshift
