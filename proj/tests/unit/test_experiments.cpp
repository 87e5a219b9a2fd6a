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

#include "labelshift/errors.hpp"
#include "labelshift/experiments.hpp"

namespace labelshift {
namespace {

CellOptions quick(std::uint64_t reps = 200) {
  CellOptions o;
  o.target_arl = 100.0;
  o.calibration_reps = reps;
  o.delay_reps = reps;
  o.seed = 3;
  return o;
}

TEST(Experiments, EvaluateProcedureCalibratesThenMeasuresDelay) {
  const ScenarioPreset& preset = find_preset("scenario1-s1a-m1000");
  const CellResult cell = evaluate_procedure("optimal", optimal_procedure(preset), quick());
  EXPECT_EQ(cell.name, "optimal");
  EXPECT_TRUE(cell.within_tolerance);
  EXPECT_NEAR(cell.oc.arl.mean, 100.0, 2.0);
  EXPECT_GT(cell.oc.add.mean, 5.0);
  EXPECT_LT(cell.oc.add.mean, 30.0);
  EXPECT_EQ(cell.oc.add.n, 200u);
}

TEST(Experiments, CellsAreReproducible) {
  const ScenarioPreset& preset = find_preset("dengue-abrupt");
  const Procedure proc = score_procedure(preset, preset_score_model(preset));
  const CellResult a = evaluate_procedure("p", proc, quick());
  const CellResult b = evaluate_procedure("p", proc, quick());
  EXPECT_EQ(a.oc.threshold, b.oc.threshold);
  EXPECT_EQ(a.oc.add.mean, b.oc.add.mean);
}

// Exact density ratio beats the classifier plug-in, which beats a 0/1 cut.
TEST(Experiments, InformationOrderingOnDengueAnalogue) {
  const ScenarioPreset& preset = find_preset("dengue-abrupt");
  const Classifier model = preset_score_model(preset);
  const CellOptions o = quick(1000);
  const double optimal = evaluate_procedure("o", optimal_procedure(preset), o).oc.add.mean;
  const double score = evaluate_procedure("s", score_procedure(preset, model), o).oc.add.mean;
  const double binary =
      evaluate_procedure("b", binarized_procedure(preset, model, 0.5), o).oc.add.mean;
  EXPECT_LT(optimal, score + 1.0);
  EXPECT_LT(score, binary);
}

TEST(Experiments, FixedScoreModelUsesTrueParameters) {
  const ScenarioPreset& preset = find_preset("dengue-abrupt");
  const LdaModel model = preset_score_model(preset);
  EXPECT_EQ(model.pi_inf(), 0.33);
  EXPECT_EQ(model.mu1(), preset.pre.mu1);
  EXPECT_THROW(preset_score_model(find_preset("scenario1-s1a-m200")), InputError);
}

TEST(Experiments, TrainedClassifiersAreSeeded) {
  const ScenarioPreset& preset = find_preset("scenario1-s1c-m200");
  const Classifier a = train_classifier(preset.pre, ClassifierKind::Qda, 200, 5);
  const Classifier b = train_classifier(preset.pre, ClassifierKind::Qda, 200, 5);
  Eigen::VectorXd x(2);
  x << 0.5, 1.0;
  EXPECT_EQ(classifier_score(a, x), classifier_score(b, x));
  EXPECT_TRUE(std::holds_alternative<QdaModel>(a));
  EXPECT_THROW(train_classifier(preset.pre, ClassifierKind::Lda, 1, 5), InputError);
}

TEST(Experiments, ReproduceTableWithTinyBudgetFlagsStandardErrors) {
  const auto reports = reproduce_table("dengue-analogue", 1, quick());
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].rows.size(), 5u);
  EXPECT_TRUE(reports[0].unreliable_se);
  EXPECT_EQ(reports[0].rows[0].oc.add.n, 2u);
  const auto again = reproduce_table("dengue-analogue", 1, quick());
  EXPECT_EQ(reports[0].to_json_lines(), again[0].to_json_lines());
  EXPECT_THROW(reproduce_table("table9", 10, quick()), InputError);
}

}  // namespace
}  // namespace labelshift
