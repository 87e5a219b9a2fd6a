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

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "labelshift/errors.hpp"
#include "labelshift/ratio.hpp"
#include "labelshift/rng.hpp"
#include "labelshift/simgen.hpp"
#include "labelshift/stats.hpp"

namespace labelshift {
namespace {

TEST(ScoreRatio, LinearInScore) {
  const LabelShiftPriors priors{0.25, 0.75};
  EXPECT_DOUBLE_EQ(label_shift_ratio(0.0, priors), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(label_shift_ratio(1.0, priors), 3.0);
  EXPECT_DOUBLE_EQ(label_shift_ratio(0.625, priors), 2.0);
  EXPECT_DOUBLE_EQ(label_shift_ratio(0.0625, priors), 0.5);
  EXPECT_DOUBLE_EQ(priors.slope(), 3.0 - 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(priors.intercept(), 1.0 / 3.0);
}

TEST(ScoreRatio, NoShiftGivesUnitRatio) {
  const LabelShiftPriors priors{0.4, 0.4};
  for (double s : {0.0, 0.3, 1.0}) EXPECT_DOUBLE_EQ(label_shift_ratio(s, priors), 1.0);
}

TEST(ScoreRatio, RejectsOutOfRangeInputs) {
  const LabelShiftPriors priors{0.25, 0.75};
  EXPECT_THROW(label_shift_ratio(-0.01, priors), InputError);
  EXPECT_THROW(label_shift_ratio(1.2, priors), InputError);
  EXPECT_THROW(label_shift_ratio(NAN, priors), InputError);
  EXPECT_THROW(label_shift_ratio(0.5, LabelShiftPriors{0.0, 0.5}), InputError);
  EXPECT_THROW(label_shift_ratio(0.5, LabelShiftPriors{0.5, 1.0}), InputError);
  EXPECT_THROW(ScoreRatioModel(LabelShiftPriors{1.5, 0.5}), InputError);
}

TEST(ScoreRatio, BinaryLabelRatioEqualsScoreAtLabel) {
  const LabelShiftPriors priors{0.4, 0.7};
  EXPECT_EQ(binary_label_ratio(1, priors), label_shift_ratio(1.0, priors));
  EXPECT_EQ(binary_label_ratio(0, priors), label_shift_ratio(0.0, priors));
  EXPECT_DOUBLE_EQ(binary_label_ratio(1, priors), 1.75);
  EXPECT_DOUBLE_EQ(binary_label_ratio(0, priors), 0.5);
  EXPECT_THROW(binary_label_ratio(2, priors), InputError);
}

TEST(ScoreRatio, CallableModelMatchesFunction) {
  const ScoreRatioModel model(LabelShiftPriors{0.3, 0.68});
  EXPECT_EQ(model(0.42), label_shift_ratio(0.42, model.priors()));
}

// The score ratio at the exact posterior equals the density ratio of the
// two mixtures: pi0 f1 + (1-pi0) f0 over pi_inf f1 + (1-pi_inf) f0.
TEST(ScoreRatioProperty, PosteriorScoreRecoversTrueRatio) {
  for (const char* name : {"scenario1-s1a-m1000", "scenario1-s1c-m200", "dengue-abrupt"}) {
    const ScenarioPreset& preset = find_preset(name);
    const GaussianMixture pre(preset.pre);
    const LabelShiftPriors priors{preset.pi_inf(), preset.pi_0()};
    Rng rng(17);
    Eigen::VectorXd x;
    for (int i = 0; i < 500; ++i) {
      pre.sample_class(rng.bernoulli(0.5) ? 1 : 0, rng, x);
      x *= 1.5;  // reach into the tails as well
      const double truth = true_scenario1_lr(x, preset.pre, preset.post);
      const double via_score = label_shift_ratio(pre.posterior(x), priors);
      ASSERT_NEAR(via_score, truth, 1e-12 * std::max(1.0, truth)) << name;
    }
  }
}

TEST(GaussianShift, RatioAndFit) {
  const GaussianShiftModel model{1.0};
  EXPECT_DOUBLE_EQ(gaussian_shift_ratio(0.5, model), 1.0);
  EXPECT_DOUBLE_EQ(gaussian_shift_log_ratio(2.0, model), 1.5);
  const std::vector<double> train{0.5, 1.5, 1.0};
  EXPECT_DOUBLE_EQ(fit_gaussian_mean(train).mu_hat, 1.0);
  EXPECT_THROW(fit_gaussian_mean(std::vector<double>{}), InputError);
}

TEST(ScoreRatioProperty, AffineAndPositive) {
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const LabelShiftPriors priors{0.01 + 0.98 * rng.uniform(), 0.01 + 0.98 * rng.uniform()};
    const double s0 = rng.uniform(), ds = 0.5 * rng.uniform() * (1.0 - s0);
    const double r0 = label_shift_ratio(s0, priors);
    const double r1 = label_shift_ratio(s0 + ds, priors);
    const double r2 = label_shift_ratio(s0 + 2.0 * ds, priors);
    ASSERT_NEAR((r2 - r1) - (r1 - r0), 0.0, 1e-14 * std::max(1.0, r2));
    ASSERT_GT(label_shift_ratio(0.0, priors), 0.0);
    ASSERT_GT(label_shift_ratio(1.0, priors), 0.0);
    ASSERT_GT(r0, 0.0);
  }
}

// E_inf[lambda] = 1 when the score is the pre-change posterior.
TEST(ScoreRatioProperty, UnitMeanUnderPreChangeScores) {
  const ScenarioPreset& preset = find_preset("scenario1-s1b-m1000");
  const GaussianMixture pre(preset.pre);
  const LabelShiftPriors priors{preset.pi_inf(), preset.pi_0()};
  const auto sample = sample_training_set(preset.pre, 100000, 8);
  SampleMoments m;
  for (const auto& s : sample) m.add(label_shift_ratio(pre.posterior(s.x), priors));
  EXPECT_NEAR(m.mean(), 1.0, 3.0 * m.standard_error());
}

}  // namespace
}  // namespace labelshift
