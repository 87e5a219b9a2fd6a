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

#include <cstdint>
#include <string>
#include <vector>

#include "labelshift/classifiers.hpp"
#include "labelshift/mixture.hpp"
#include "labelshift/oc.hpp"
#include "labelshift/ratio.hpp"
#include "labelshift/report.hpp"
#include "labelshift/simgen.hpp"

namespace labelshift {

// Budget of one table cell: calibrate to the target ARL, then estimate ADD
// at the calibrated threshold.
struct CellOptions {
  double target_arl = 500.0;
  double tol_rel = 0.02;
  std::uint64_t calibration_reps = 2000;
  std::uint64_t delay_reps = 2000;
  std::uint64_t arl_cap = 0;    // 0 = 20 x target
  std::uint64_t delay_cap = 0;  // 0 = 20 x target
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct CellResult {
  std::string name;
  OperatingCharacteristics oc;
  bool within_tolerance = true;
};

CellResult evaluate_procedure(const std::string& name, const Procedure& procedure,
                              const CellOptions& options);

// Stream sampler of a preset's pre/post mixtures and prevalence path.
StreamSampler preset_sampler(const ScenarioPreset& preset);

// Exact mixture likelihood ratio of the preset (optimal CUSUM).
Procedure optimal_procedure(const ScenarioPreset& preset);
// Binary CUSUM on the true labels.
Procedure label_procedure(const ScenarioPreset& preset);
// CUSUM on the score ratio of `model` with the preset's priors.
Procedure score_procedure(const ScenarioPreset& preset, const Classifier& model);
// CUSUM on the score ratio of binarize(score, cut).
Procedure binarized_procedure(const ScenarioPreset& preset, const Classifier& model, double cut);
// Window-limited mixture over Pi0 = [pi0_min, pi0_max] fed by `model`.
Procedure mixture_procedure(const ScenarioPreset& preset, const Classifier& model,
                            MixtureConfig config);

// LDA posterior at the preset's true class parameters with the fixed prior;
// throws InputError for presets without one.
LdaModel preset_score_model(const ScenarioPreset& preset);

enum class ClassifierKind { Lda, Qda };

// Classifier fitted on m labeled draws from `spec`, with the training class
// frequency as its prior.
Classifier train_classifier(const GaussianMixtureSpec& spec, ClassifierKind kind, std::size_t m,
                            std::uint64_t seed);

// Classifier CUSUM in which every replication fits its own classifier on a
// fresh training set of size m from the pre-change mixture. Run lengths,
// and hence the calibrated threshold, average over training sets.
Procedure trained_procedure(const ScenarioPreset& preset, ClassifierKind kind, std::size_t m);

CellResult classifier_cell(const std::string& name, const ScenarioPreset& preset,
                           ClassifierKind kind, std::size_t m, const CellOptions& options);

// Cells of a named table ("scenario1", "scenario2", "dengue-analogue"),
// grouped into one report per setting. `budget` sets replications per cell;
// budgets below 2 are raised to 2 and the reports flag the SEs.
std::vector<ComparisonReport> reproduce_table(const std::string& table, std::uint64_t budget,
                                              const CellOptions& base);

}  // namespace labelshift
