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

#include <cmath>
#include <vector>

#include "labelshift/errors.hpp"
#include "labelshift/rng.hpp"
#include "labelshift/simgen.hpp"
#include "labelshift/stats.hpp"

namespace labelshift {
namespace {

StreamSpec scenario_stream(const std::string& preset_name, std::uint64_t length, std::uint64_t nu,
                           std::uint64_t seed) {
  const ScenarioPreset& preset = find_preset(preset_name);
  StreamSpec spec;
  spec.pre = preset.pre;
  spec.post = preset.post;
  spec.path = preset.path;
  spec.length = length;
  spec.changepoint_nu = nu;
  spec.seed = seed;
  return spec;
}

TEST(SimGen, SameSeedSameStream) {
  const auto a = sample_stream(scenario_stream("scenario1-s1c-m200", 500, 200, 9));
  const auto b = sample_stream(scenario_stream("scenario1-s1c-m200", 500, 200, 9));
  const auto c = sample_stream(scenario_stream("scenario1-s1c-m200", 500, 200, 10));
  ASSERT_EQ(a.size(), 500u);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].y, b[i].y);
    ASSERT_EQ(a[i].x, b[i].x);
    differs = differs || a[i].x != c[i].x;
  }
  EXPECT_TRUE(differs);
}

TEST(SimGen, RegimeFollowsChangepoint) {
  const auto points = sample_stream(scenario_stream("scenario1-s1a-m1000", 10, 4, 1));
  for (std::size_t i = 0; i < points.size(); ++i) {
    EXPECT_EQ(points[i].regime, i < 4 ? Regime::Pre : Regime::Post);
  }
  EXPECT_THROW(sample_stream(scenario_stream("scenario1-s1a-m1000", 10, 11, 1)), InputError);
}

TEST(SimGen, PostChangeMeanMatchesMixture) {
  // Post-change s1a: mean 0.7 * 1.5 = 1.05 per coordinate and variance
  // 1 + 0.21 * 1.5^2 = 1.4725, so the SE of a 100000-point mean is 0.003837.
  const std::uint64_t n = 100000;
  const auto points = sample_stream(scenario_stream("scenario1-s1a-m1000", n, 0, 5));
  SampleMoments m0, m1, label;
  for (const auto& p : points) {
    m0.add(p.x[0]);
    m1.add(p.x[1]);
    label.add(p.y);
  }
  const double se = std::sqrt(1.4725 / n);
  EXPECT_NEAR(se, 0.003837, 1e-6);
  EXPECT_NEAR(m0.mean(), 1.05, 4.0 * se);
  EXPECT_NEAR(m1.mean(), 1.05, 4.0 * se);
  EXPECT_NEAR(m0.variance(), 1.4725, 0.03);
  EXPECT_NEAR(label.mean(), 0.7, 4.0 * std::sqrt(0.21 / n));
}

TEST(SimGen, TrainingSetClassFraction) {
  const auto train = sample_training_set(find_preset("scenario1-s1b-m5000").pre, 5000, 2);
  ASSERT_EQ(train.size(), 5000u);
  // 0.4 +- 3 SE with SE = sqrt(0.24 / 5000) = 0.0069
  EXPECT_NEAR(label_frequency(train), 0.4, 0.021);
  EXPECT_THROW(sample_training_set(find_preset("scenario1-s1b-m5000").pre, 0, 2), InputError);
}

TEST(SimGen, GradualPathMovesLinearly) {
  const PrevalencePath ramp = PrevalencePath::gradual(100);
  EXPECT_DOUBLE_EQ(path_prevalence(0.3, 0.68, ramp, 50), 0.49);
  EXPECT_DOUBLE_EQ(path_prevalence(0.3, 0.68, ramp, 100), 0.68);
  EXPECT_DOUBLE_EQ(path_prevalence(0.3, 0.68, ramp, 1000), 0.68);
  EXPECT_DOUBLE_EQ(path_prevalence(0.3, 0.68, PrevalencePath::abrupt(), 1), 0.68);
}

TEST(SimGen, GradualStreamLabelRateRamps) {
  const ScenarioPreset& preset = find_preset("dengue-gradual");
  SampleMoments early, late;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const auto points = sample_stream(scenario_stream("dengue-gradual", 200, 0, seed));
    for (std::size_t i = 0; i < 20; ++i) early.add(points[i].y);
    for (std::size_t i = 150; i < 200; ++i) late.add(points[i].y);
  }
  // Offsets 1..20 average a prevalence of 0.3 + 0.38 * 10.5 / 100.
  EXPECT_NEAR(early.mean(), 0.3 + 0.38 * 0.105, 4.0 * early.standard_error());
  EXPECT_NEAR(late.mean(), preset.pi_0(), 4.0 * late.standard_error());
}

TEST(GaussianMixture, DensityAndPosteriorAgree) {
  const GaussianMixture mix(find_preset("scenario1-s1c-m200").pre);
  Eigen::VectorXd x(2);
  x << 0.3, -1.2;
  const double f0 = std::exp(mix.class_log_density(0, x));
  const double f1 = std::exp(mix.class_log_density(1, x));
  EXPECT_NEAR(f0, std::exp(-0.5 * x.squaredNorm()) / (2.0 * M_PI), 1e-15);
  EXPECT_NEAR(mix.posterior(x), 0.4 * f1 / (0.4 * f1 + 0.6 * f0), 1e-14);
  EXPECT_NEAR(std::exp(mix.log_density(x)), 0.4 * f1 + 0.6 * f0, 1e-15);
}

TEST(GaussianMixture, RejectsBadParameters) {
  GaussianMixtureSpec spec = find_preset("scenario1-s1a-m200").pre;
  spec.prevalence = 1.0;
  EXPECT_THROW(GaussianMixture{spec}, InputError);
  spec = find_preset("scenario1-s1a-m200").pre;
  spec.sigma1(0, 0) = -1.0;
  EXPECT_THROW(GaussianMixture{spec}, NumericalError);
  spec = find_preset("scenario1-s1a-m200").pre;
  spec.mu1 = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(GaussianMixture{spec}, InputError);
}

TEST(SimGen, LogRatioHelpers) {
  const ScenarioPreset& s1 = find_preset("scenario1-s1a-m1000");
  const ScenarioPreset& s2 = find_preset("scenario2-s1a-far");
  Eigen::VectorXd x(2);
  x << 1.0, 0.2;
  EXPECT_NEAR(std::exp(mixture_log_lr(GaussianMixture(s1.pre), GaussianMixture(s1.post), x)),
              true_scenario1_lr(x, s1.pre, s1.post), 1e-13);
  EXPECT_TRUE(s1.label_shift());
  EXPECT_FALSE(s2.label_shift());
  EXPECT_THROW(true_scenario1_lr(x, s2.pre, s2.post), InputError);
}

TEST(SimGen, PresetsAreCompleteAndValid) {
  std::size_t count = 0;
  for (const auto& preset : scenario_presets()) {
    EXPECT_NO_THROW(GaussianMixture{preset.pre}) << preset.name;
    EXPECT_NO_THROW(GaussianMixture{preset.post}) << preset.name;
    EXPECT_GT(preset.training_size, 0u);
    EXPECT_EQ(&find_preset(preset.name), &preset);
    ++count;
  }
  EXPECT_EQ(count, 9u + 9u + 2u + 1u);
  EXPECT_THROW(find_preset("no-such-preset"), InputError);
  EXPECT_EQ(find_preset("example3-d10").pre.dim(), 10);
}

TEST(SimGen, SamplersAreDeterministicPerSeedAndRegime) {
  const auto sampler = make_gaussian_shift_sampler(1.0);
  auto a = sampler(4, Regime::Post);
  auto b = sampler(4, Regime::Post);
  for (int i = 0; i < 20; ++i) ASSERT_EQ(a->next().x, b->next().x);

  const auto labels = make_label_sampler(0.0, 1.0);
  auto pre = labels(1, Regime::Pre);
  auto post = labels(1, Regime::Post);
  for (int i = 0; i < 20; ++i) {
    ASSERT_EQ(pre->next().y, 0);
    ASSERT_EQ(post->next().y, 1);
  }
}

TEST(SimGen, OneStepRampEqualsAbruptChange) {
  StreamSpec abrupt = scenario_stream("scenario1-s1a-m1000", 300, 100, 14);
  StreamSpec ramp = abrupt;
  ramp.path = PrevalencePath::gradual(1);
  const auto a = sample_stream(abrupt);
  const auto b = sample_stream(ramp);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].y, b[i].y);
    ASSERT_EQ(a[i].x, b[i].x);
  }
}

TEST(SimGen, ClassConditionalMomentsMatchParameters) {
  const GaussianMixture mix(find_preset("scenario1-s1c-m200").pre);
  const Eigen::MatrixXd& sigma1 = mix.spec().sigma1;
  Rng rng(70);
  const int n = 100000;
  Eigen::VectorXd x, sum = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    mix.sample_class(1, rng, x);
    sum += x;
    cross += (x - mix.spec().mu1) * (x - mix.spec().mu1).transpose();
  }
  const Eigen::VectorXd mean = sum / n;
  const Eigen::MatrixXd cov = cross / n;
  for (int j = 0; j < 2; ++j) {
    EXPECT_NEAR(mean[j], 1.5, 3.0 * std::sqrt(sigma1(j, j) / n));
    // Var of a squared normal coordinate is 2 sigma^4.
    EXPECT_NEAR(cov(j, j), sigma1(j, j), 3.0 * std::sqrt(2.0 / n) * sigma1(j, j));
  }
  // Var(x1 x2) = s11 s22 + s12^2.
  EXPECT_NEAR(cov(0, 1), sigma1(0, 1),
              3.0 * std::sqrt((sigma1(0, 0) * sigma1(1, 1) + sigma1(0, 1) * sigma1(0, 1)) / n));
}

}  // namespace
}  // namespace labelshift
