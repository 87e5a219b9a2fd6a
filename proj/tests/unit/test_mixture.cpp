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

#include <algorithm>
#include <cmath>
#include <vector>

#include "labelshift/detector.hpp"
#include "labelshift/errors.hpp"
#include "labelshift/mixture.hpp"
#include "labelshift/ratio.hpp"
#include "labelshift/rng.hpp"

namespace labelshift {
namespace {

// Direct evaluation of
//   max_{max(1,t-window) <= k <= t} sum_j w_j prod_{i=k}^t lambda_j(s_i)
// in linear space with midpoint nodes, independent of the ring buffer.
double brute_force_statistic(const std::vector<double>& scores, std::size_t t, double pi_inf,
                             double lo, double hi, int n_quad, int window) {
  std::vector<double> nodes;
  for (int j = 0; j < n_quad; ++j) nodes.push_back(lo + (j + 0.5) * (hi - lo) / n_quad);
  const std::size_t k_min = t > static_cast<std::size_t>(window) ? t - window : 1;
  double best = 0.0;
  for (std::size_t k = k_min; k <= t; ++k) {
    double mix = 0.0;
    for (double pi0 : nodes) {
      double prod = 1.0;
      for (std::size_t i = k; i <= t; ++i) {
        const double s = scores[i - 1];
        prod *= (pi0 / pi_inf - (1 - pi0) / (1 - pi_inf)) * s + (1 - pi0) / (1 - pi_inf);
      }
      mix += prod / n_quad;
    }
    best = std::max(best, mix);
  }
  return best;
}

TEST(MixtureQuadrature, MidpointNodesWithEqualWeights) {
  MixtureConfig cfg;
  cfg.pi0_min = 0.6;
  cfg.pi0_max = 0.8;
  cfg.n_quad = 4;
  const auto q = MixtureQuadrature::build(cfg);
  ASSERT_EQ(q.nodes.size(), 4u);
  EXPECT_NEAR(q.nodes[0], 0.625, 1e-15);
  EXPECT_NEAR(q.nodes[3], 0.775, 1e-15);
  for (double lw : q.log_weights) EXPECT_NEAR(lw, std::log(0.25), 1e-15);
}

TEST(MixtureQuadrature, DegenerateIntervalIsOneNode) {
  MixtureConfig cfg;
  cfg.pi0_min = cfg.pi0_max = 0.7;
  const auto q = MixtureQuadrature::build(cfg);
  ASSERT_EQ(q.nodes.size(), 1u);
  EXPECT_EQ(q.nodes[0], 0.7);
  EXPECT_EQ(q.log_weights[0], 0.0);
}

TEST(MixtureQuadrature, CustomWeightsAreNormalized) {
  MixtureConfig cfg;
  cfg.weight = MixtureWeight::custom({0.6, 0.7, 0.8}, {1.0, 2.0, 1.0});
  const auto q = MixtureQuadrature::build(cfg);
  ASSERT_EQ(q.nodes.size(), 3u);
  EXPECT_NEAR(std::exp(q.log_weights[1]), 0.5, 1e-15);
}

TEST(Mixture, PerNodeRatiosIncludeIntervalEndpoint) {
  MixtureConfig cfg;
  cfg.pi_inf = 0.4;
  cfg.weight = MixtureWeight::custom({0.6, 0.7, 0.8}, {1.0, 1.0, 1.0});
  const auto ratios = per_pi0_log_ratios(1.0, cfg);
  ASSERT_EQ(ratios.size(), 3u);
  EXPECT_NEAR(std::exp(ratios[0]), 1.5, 1e-15);
  EXPECT_NEAR(std::exp(ratios[2]), 2.0, 1e-15);
}

TEST(Mixture, PointMassExampleStatistic) {
  // pi_inf = 0.3, pi0 = 0.7: score 0.825 -> lambda 2, score 0.0375 -> lambda 0.5.
  MixtureConfig cfg;
  cfg.pi_inf = 0.3;
  cfg.weight = MixtureWeight::point_mass(0.7);
  MixtureState state = MixtureState::initial(cfg);
  EXPECT_NEAR(std::exp(push_mixture(state, cfg, 0.825)), 2.0, 1e-14);
  EXPECT_NEAR(std::exp(push_mixture(state, cfg, 0.0375)), 1.0, 1e-14);
}

TEST(Mixture, WindowOneUsesTwoMostRecentObservations) {
  MixtureConfig cfg;
  cfg.pi_inf = 0.3;
  cfg.window = 1;
  cfg.weight = MixtureWeight::point_mass(0.7);
  MixtureState state = MixtureState::initial(cfg);
  push_mixture(state, cfg, 0.825);                     // 2
  push_mixture(state, cfg, 0.825);                     // max(4, 2)
  const double l = push_mixture(state, cfg, 0.0375);  // max(2*0.5, 0.5): the first 2 is out
  EXPECT_NEAR(std::exp(l), 1.0, 1e-14);
}

TEST(Mixture, ValidationErrors) {
  MixtureConfig cfg;
  cfg.pi0_min = 0.8;
  cfg.pi0_max = 0.6;
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = MixtureConfig{};
  cfg.weight = MixtureWeight::point_mass(0.9);
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = MixtureConfig{};
  cfg.window = 0;
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = MixtureConfig{};
  cfg.n_quad = 0;
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = MixtureConfig{};
  cfg.weight = MixtureWeight::custom({0.7}, {});
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = MixtureConfig{};
  cfg.pi0_max = 1.0;
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = MixtureConfig{};
  MixtureState state = MixtureState::initial(cfg);
  EXPECT_THROW(push_mixture(state, cfg, 1.5), InputError);
  EXPECT_THROW(run_mixture_detector(cfg, std::vector<double>{0.5}, 0), InputError);
}

// The incremental statistic equals direct evaluation of the windowed
// maximum on every prefix of random streams.
TEST(MixtureProperty, MatchesBruteForceWindowedMaximum) {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    MixtureConfig cfg;
    cfg.pi_inf = 0.2 + 0.3 * rng.uniform();
    cfg.pi0_min = 0.55 + 0.1 * rng.uniform();
    cfg.pi0_max = cfg.pi0_min + 0.2 * rng.uniform();
    cfg.n_quad = 1 + trial % 7;
    cfg.window = 1 + static_cast<int>(rng.uniform() * 25);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 50);
    std::vector<double> scores(n);
    for (double& s : scores) s = rng.uniform();
    MixtureState state = MixtureState::initial(cfg);
    for (std::size_t t = 1; t <= n; ++t) {
      const double got = push_mixture(state, cfg, scores[t - 1]);
      const double want = brute_force_statistic(scores, t, cfg.pi_inf, cfg.pi0_min, cfg.pi0_max,
                                                cfg.n_quad, cfg.window);
      ASSERT_NEAR(got, std::log(want), 1e-11) << "trial " << trial << " t " << t;
      ASSERT_NEAR(state.recompute_log_statistic(), got, 1e-11);
    }
  }
}

// With a point mass and a window covering the whole stream the mixture
// statistic is the CUSUM statistic at that prevalence.
TEST(MixtureProperty, PointMassWithLongWindowIsCusum) {
  Rng rng(3);
  MixtureConfig cfg;
  cfg.pi_inf = 0.4;
  cfg.weight = MixtureWeight::point_mass(0.7);
  cfg.window = 500;
  const LabelShiftPriors priors{0.4, 0.7};
  MixtureState state = MixtureState::initial(cfg);
  DetectorConfig cusum = DetectorConfig::cusum(1e300);
  DetectorState det = DetectorState::initial(cusum);
  for (int t = 0; t < 300; ++t) {
    const double s = rng.uniform();
    det = update_detector(det, cusum, label_shift_ratio(s, priors));
    ASSERT_NEAR(push_mixture(state, cfg, s), det.log_stat, 1e-10);
  }
}

TEST(MixtureProperty, FunctionalAndInPlaceUpdatesAgree) {
  Rng rng(12);
  MixtureConfig cfg;
  cfg.window = 7;
  MixtureState a = MixtureState::initial(cfg);
  MixtureState b = MixtureState::initial(cfg);
  for (int t = 0; t < 40; ++t) {
    const double s = rng.uniform();
    auto [next, value] = update_mixture(a, cfg, s);
    a = std::move(next);
    ASSERT_EQ(value, push_mixture(b, cfg, s));
    ASSERT_EQ(a.t(), b.t());
  }
}

TEST(MixtureDetector, StopsAtFirstCrossing) {
  MixtureConfig cfg;
  cfg.pi_inf = 0.3;
  cfg.threshold = 3.0;
  cfg.weight = MixtureWeight::point_mass(0.7);
  const std::vector<double> scores{0.825, 0.825, 0.0375, 0.825};
  const RunResult run = run_mixture_detector(cfg, scores, 100, true);
  ASSERT_TRUE(run.stopped);
  EXPECT_EQ(run.stopping_time, 2u);
  EXPECT_NEAR(std::exp(run.final_log_stat), 4.0, 1e-13);
}

// Products prod_{i=k..t} lambda_j(s_i) for every admissible k at node pi0.
std::vector<double> suffix_products(const std::vector<double>& scores, std::size_t t,
                                    double pi_inf, double pi0, int window) {
  const std::size_t k_min = t > static_cast<std::size_t>(window) ? t - window : 1;
  std::vector<double> out;
  const LabelShiftPriors priors{pi_inf, pi0};
  for (std::size_t k = k_min; k <= t; ++k) {
    double prod = 1.0;
    for (std::size_t i = k; i <= t; ++i) prod *= label_shift_ratio(scores[i - 1], priors);
    out.push_back(prod);
  }
  return out;
}

// A weighted mean of node products lies between the smallest and largest
// node product at every start k, so the statistic is bracketed by
// max_k min_j and max_j max_k.
TEST(MixtureProperty, BracketedByNodeProducts) {
  Rng rng(90);
  for (int trial = 0; trial < 50; ++trial) {
    MixtureConfig cfg;
    cfg.pi_inf = 0.3;
    cfg.n_quad = 5;
    cfg.window = 10;
    const auto q = MixtureQuadrature::build(cfg);
    std::vector<double> scores(30);
    for (double& s : scores) s = rng.uniform();
    MixtureState state = MixtureState::initial(cfg);
    for (std::size_t t = 1; t <= scores.size(); ++t) {
      const double got = push_mixture(state, cfg, scores[t - 1]);
      std::vector<double> lo_k, hi_k;
      for (double pi0 : q.nodes) {
        const auto prods = suffix_products(scores, t, 0.3, pi0, 10);
        if (lo_k.empty()) {
          lo_k = hi_k = prods;
          continue;
        }
        for (std::size_t k = 0; k < prods.size(); ++k) {
          lo_k[k] = std::min(lo_k[k], prods[k]);
          hi_k[k] = std::max(hi_k[k], prods[k]);
        }
      }
      const double lo = std::log(*std::max_element(lo_k.begin(), lo_k.end()));
      const double hi = std::log(*std::max_element(hi_k.begin(), hi_k.end()));
      ASSERT_GE(got, lo - 1e-12);
      ASSERT_LE(got, hi + 1e-12);
    }
  }
}

TEST(MixtureProperty, WiderWindowNeverLowersStatistic) {
  Rng rng(91);
  std::vector<double> scores(120);
  for (double& s : scores) s = rng.uniform();
  std::vector<double> previous(scores.size(), -INFINITY);
  for (int window : {1, 2, 5, 10, 40, 200}) {
    MixtureConfig cfg;
    cfg.window = window;
    MixtureState state = MixtureState::initial(cfg);
    for (std::size_t t = 0; t < scores.size(); ++t) {
      const double v = push_mixture(state, cfg, scores[t]);
      ASSERT_GE(v, previous[t] - 1e-12) << window;
      previous[t] = v;
    }
  }
}

TEST(MixtureProperty, LongWindowMatchesUnboundedStoppingTimes) {
  Rng rng(92);
  for (int trial = 0; trial < 200; ++trial) {
    MixtureConfig cfg;
    cfg.pi_inf = 0.3 + 0.2 * rng.uniform();
    cfg.n_quad = 1 + trial % 9;
    cfg.window = 50;
    cfg.threshold = 1.0 + 20.0 * rng.uniform();
    std::vector<double> scores(1 + trial % 50);
    for (double& s : scores) s = rng.uniform();
    const RunResult run = run_mixture_detector(cfg, scores, 100, true);
    std::uint64_t brute_time = 0;
    for (std::size_t t = 1; t <= scores.size(); ++t) {
      const double v = brute_force_statistic(scores, t, cfg.pi_inf, cfg.pi0_min, cfg.pi0_max,
                                             cfg.n_quad, 1000);
      ASSERT_NEAR(run.trajectory[t - 1], std::log(v), 1e-10);
      if (v >= cfg.threshold) {
        brute_time = t;
        break;
      }
    }
    ASSERT_EQ(run.stopped ? run.stopping_time : 0, brute_time);
  }
}

}  // namespace
}  // namespace labelshift
