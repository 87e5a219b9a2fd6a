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

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "labelshift/errors.hpp"
#include "labelshift/fredholm.hpp"
#include "labelshift/oc.hpp"
#include "labelshift/simgen.hpp"

namespace labelshift {
namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Expected run length of Page's form V_t = max(0, V_{t-1} + Z), V_0 = 0,
// Z ~ N(drift, sd^2), stopped when V_{t-1} + Z >= h. Nystrom on the
// linear scale with the atom at zero as an extra unknown. Independent of
// the library solver (different variable, grid and boundary handling).
double page_arl(double drift, double sd, double h, int n) {
  const QuadratureRule rule = gauss_legendre(n, 0.0, h);
  const auto kernel = [&](double from, double to) {
    const double z = (to - from - drift) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * M_PI));
  };
  // Unknowns: L(x_1..x_n), L(0).
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    const double from = i < n ? rule.nodes[i] : 0.0;
    for (int k = 0; k < n; ++k) m(i, k) -= rule.weights[k] * kernel(from, rule.nodes[k]);
    m(i, n) -= normal_cdf((-from - drift) / sd);
  }
  const Eigen::VectorXd v = m.partialPivLu().solve(Eigen::VectorXd::Ones(n + 1));
  return v[n];
}

FredholmProblem gaussian_problem(double log_a, bool post, int nodes = 64,
                                 UpdateRule rule = UpdateRule::Cusum) {
  FredholmProblem p;
  p.lr_density = post ? [](double s) { return gaussian_shift_lr_density_post(s, 1.0); }
                      : [](double s) { return gaussian_shift_lr_density_pre(s, 1.0); };
  p.rule = rule;
  p.threshold = std::exp(log_a);
  p.n_nodes = nodes;
  return p;
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const QuadratureRule rule = gauss_legendre(5, 0.0, 2.0);
  double sum9 = 0.0, sum_w = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum9 += rule.weights[i] * std::pow(rule.nodes[i], 9);
    sum_w += rule.weights[i];
  }
  EXPECT_NEAR(sum9, 102.4, 1e-11);
  EXPECT_NEAR(sum_w, 2.0, 1e-15);
  const QuadratureRule sym = gauss_legendre(8);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(sym.nodes[i], -sym.nodes[7 - i], 1e-15);
  EXPECT_THROW(gauss_legendre(0), InputError);
}

TEST(LrDensity, LognormalShapes) {
  // lambda = e^{X - 1/2}: log lambda ~ N(-1/2, 1) before, N(1/2, 1) after.
  const double s = 1.3;
  const double z_pre = std::log(s) + 0.5;
  EXPECT_NEAR(gaussian_shift_lr_density_pre(s, 1.0),
              std::exp(-0.5 * z_pre * z_pre) / (s * std::sqrt(2.0 * M_PI)), 1e-15);
  // Change of measure: f_post(s) = s f_pre(s).
  EXPECT_NEAR(gaussian_shift_lr_density_post(s, 1.0), s * gaussian_shift_lr_density_pre(s, 1.0),
              1e-15);
  EXPECT_EQ(gaussian_shift_lr_density_pre(0.0, 1.0), 0.0);
  EXPECT_EQ(gaussian_shift_lr_density_pre(-1.0, 1.0), 0.0);
}

TEST(Fredholm, CusumArlMatchesIndependentPageEquation) {
  for (double log_a : {2.0, 3.5, 5.0, 6.0}) {
    const double library = fredholm_expected_stopping(gaussian_problem(log_a, false), 1.0);
    const double oracle = page_arl(-0.5, 1.0, log_a, 160);
    EXPECT_NEAR(library / oracle, 1.0, 1e-6) << log_a;
  }
}

TEST(Fredholm, CusumDelayMatchesIndependentPageEquation) {
  for (double log_a : {2.0, 5.0}) {
    const double library = fredholm_expected_stopping(gaussian_problem(log_a, true), 1.0);
    EXPECT_NEAR(library / page_arl(0.5, 1.0, log_a, 160), 1.0, 1e-6) << log_a;
  }
}

TEST(Fredholm, FrozenArlValues) {
  const double expected[][2] = {{2.0, 38.5475}, {3.5, 199.574}, {5.0, 930.887}, {6.0, 2553.12}};
  for (const auto& [log_a, arl] : expected) {
    EXPECT_NEAR(fredholm_expected_stopping(gaussian_problem(log_a, false), 1.0), arl, 1e-5 * arl);
  }
}

TEST(Fredholm, SelfConvergence) {
  for (double log_a : {2.0, 5.0, 6.5}) {
    const double coarse = fredholm_expected_stopping(gaussian_problem(log_a, false, 64), 1.0);
    const double fine = fredholm_expected_stopping(gaussian_problem(log_a, false, 128), 1.0);
    EXPECT_LT(std::abs(coarse / fine - 1.0), 1e-3) << log_a;
  }
}

TEST(Fredholm, ShiryaevRobertsAgreesWithMonteCarlo) {
  const FredholmProblem p = gaussian_problem(4.0, false, 96, UpdateRule::ShiryaevRoberts);
  const double v = fredholm_expected_stopping(p, 0.0);
  const Procedure proc = make_recursive_procedure(
      UpdateRule::ShiryaevRoberts, 0.0, make_gaussian_shift_sampler(1.0),
      [](const Observation& o) { return o.x[0] - 0.5; });
  MonteCarloOptions o;
  o.n_reps = 4000;
  o.seed = 3;
  const auto mc = estimate_run_length(proc, 4.0, Regime::Pre, o);
  EXPECT_NEAR(mc.mean, v, 4.0 * mc.se);
}

TEST(Fredholm, InterpolantReproducesNodeValues) {
  const FredholmSolution sol = solve_fredholm(gaussian_problem(3.0, false));
  const auto& grid = sol.grid();
  ASSERT_EQ(grid.nodes.size(), sol.values().size());
  for (std::size_t i = 0; i < grid.nodes.size(); i += 7) {
    EXPECT_NEAR(sol(grid.nodes[i]), sol.values()[i], 1e-9 * sol.values()[i]);
  }
  // CUSUM restarts below 1: v(x) is flat on [0, 1].
  EXPECT_NEAR(sol(0.0), sol(1.0), 1e-9 * sol(1.0));
  EXPECT_NEAR(sol(0.4), sol(1.0), 1e-9 * sol(1.0));
}

TEST(Fredholm, RejectsBadProblems) {
  FredholmProblem p = gaussian_problem(3.0, false);
  p.n_nodes = 8;
  EXPECT_THROW(solve_fredholm(p), InputError);
  p = gaussian_problem(3.0, false);
  p.threshold = 0.0;
  EXPECT_THROW(solve_fredholm(p), InputError);
  p = gaussian_problem(3.0, false);
  p.lr_density = [](double s) { return 2.0 * gaussian_shift_lr_density_pre(s, 1.0); };
  EXPECT_THROW(solve_fredholm(p), InputError);
  p.lr_density = [](double s) { return s < 1.0 ? -1.0 : 0.0; };
  EXPECT_THROW(solve_fredholm(p), InputError);
  // Uniform on [0, 2] with the support given: unit mass, accepted.
  p.lr_density = [](double s) { return s >= 0.0 && s <= 2.0 ? 0.5 : 0.0; };
  p.support = std::make_pair(0.0, 2.0);
  EXPECT_NO_THROW(solve_fredholm(p));
}

TEST(Fredholm, SolutionNonnegativeAndNondecreasingInThreshold) {
  const std::vector<double> starts{0.0, 0.5, 1.0, 1.5, 2.5};
  std::vector<double> previous(starts.size(), 0.0);
  for (double log_a = 1.0; log_a <= 6.0; log_a += 0.25) {
    const FredholmSolution sol = solve_fredholm(gaussian_problem(log_a, false));
    for (double v : sol.values()) ASSERT_GE(v, 0.0);
    for (std::size_t i = 0; i < starts.size(); ++i) {
      if (starts[i] >= std::exp(log_a)) continue;
      const double v = sol(starts[i]);
      ASSERT_GE(v, previous[i]) << log_a << " " << starts[i];
      previous[i] = v;
    }
  }
}

}  // namespace
}  // namespace labelshift
