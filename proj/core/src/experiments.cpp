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

#include "labelshift/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "labelshift/errors.hpp"
#include "labelshift/rng.hpp"
#include "labelshift/stats.hpp"

namespace labelshift {

namespace {

// Seed streams of a cell.
constexpr std::uint64_t kCalibrationStream = 1;
constexpr std::uint64_t kDelayStream = 2;
constexpr std::uint64_t kTrainingStream = 100;

std::uint64_t resolve_cap(std::uint64_t cap, double target) {
  return cap > 0 ? cap : static_cast<std::uint64_t>(std::ceil(20.0 * target));
}

LabelShiftPriors preset_priors(const ScenarioPreset& preset) {
  LabelShiftPriors priors{preset.pi_inf(), preset.pi_0()};
  priors.validate();
  return priors;
}

std::shared_ptr<const Classifier> share(const Classifier& model) {
  return std::make_shared<const Classifier>(model);
}

}  // namespace

CellResult evaluate_procedure(const std::string& name, const Procedure& procedure,
                              const CellOptions& options) {
  CalibrationOptions cal;
  cal.tol_rel = options.tol_rel;
  cal.n_reps = options.calibration_reps;
  cal.cap = resolve_cap(options.arl_cap, options.target_arl);
  cal.seed = derive_seed(options.seed, kCalibrationStream);
  cal.threads = options.threads;
  const CalibrationResult calibrated = calibrate_threshold(procedure, options.target_arl, cal);

  MonteCarloOptions delay;
  delay.n_reps = options.delay_reps;
  delay.cap = resolve_cap(options.delay_cap, options.target_arl);
  delay.seed = derive_seed(options.seed, kDelayStream);
  delay.threads = options.threads;

  CellResult out;
  out.name = name;
  out.oc.threshold = calibrated.threshold;
  out.oc.arl = calibrated.arl;
  out.oc.add = estimate_run_length(procedure, calibrated.log_threshold, Regime::Post, delay);
  out.within_tolerance = calibrated.within_tolerance;
  return out;
}

StreamSampler preset_sampler(const ScenarioPreset& preset) {
  return make_mixture_sampler(GaussianMixture(preset.pre), GaussianMixture(preset.post),
                              preset.path);
}

Procedure optimal_procedure(const ScenarioPreset& preset) {
  auto pair = std::make_shared<const std::pair<GaussianMixture, GaussianMixture>>(
      GaussianMixture(preset.pre), GaussianMixture(preset.post));
  return make_recursive_procedure(
      UpdateRule::Cusum, 1.0, preset_sampler(preset),
      [pair](const Observation& o) { return mixture_log_lr(pair->first, pair->second, o.x); });
}

Procedure label_procedure(const ScenarioPreset& preset) {
  const LabelShiftPriors priors = preset_priors(preset);
  const double log_up = std::log(binary_label_ratio(1, priors));
  const double log_down = std::log(binary_label_ratio(0, priors));
  return make_recursive_procedure(
      UpdateRule::Cusum, 1.0, preset_sampler(preset),
      [log_up, log_down](const Observation& o) { return o.y == 1 ? log_up : log_down; });
}

Procedure score_procedure(const ScenarioPreset& preset, const Classifier& model) {
  const LabelShiftPriors priors = preset_priors(preset);
  auto shared = share(model);
  return make_recursive_procedure(
      UpdateRule::Cusum, 1.0, preset_sampler(preset), [shared, priors](const Observation& o) {
        return std::log(label_shift_ratio(classifier_score(*shared, o.x), priors));
      });
}

Procedure binarized_procedure(const ScenarioPreset& preset, const Classifier& model, double cut) {
  const LabelShiftPriors priors = preset_priors(preset);
  const double log_up = std::log(label_shift_ratio(1.0, priors));
  const double log_down = std::log(label_shift_ratio(0.0, priors));
  auto shared = share(model);
  return make_recursive_procedure(
      UpdateRule::Cusum, 1.0, preset_sampler(preset),
      [shared, cut, log_up, log_down](const Observation& o) {
        return binarize(classifier_score(*shared, o.x), cut) == 1 ? log_up : log_down;
      });
}

Procedure mixture_procedure(const ScenarioPreset& preset, const Classifier& model,
                            MixtureConfig config) {
  config.pi_inf = preset.pi_inf();
  auto shared = share(model);
  return make_mixture_procedure(std::move(config), preset_sampler(preset),
                                [shared](const Observation& o) {
                                  return classifier_score(*shared, o.x);
                                });
}

LdaModel preset_score_model(const ScenarioPreset& preset) {
  if (!preset.fixed_score_prior) {
    throw InputError("preset '" + preset.name + "' has no fixed scoring model");
  }
  if (!preset.pre.sigma0.isApprox(preset.pre.sigma1)) {
    throw InputError("fixed scoring model needs equal class covariances");
  }
  return LdaModel(preset.pre.mu0, preset.pre.mu1, preset.pre.sigma0, *preset.fixed_score_prior);
}

namespace {

// CUSUM whose replication first fits its own classifier on a fresh training
// set, so run lengths average over the training distribution as well.
class TrainedReplication final : public Replication {
 public:
  TrainedReplication(Classifier model, LabelShiftPriors priors,
                     std::unique_ptr<ObservationStream> stream)
      : model_(std::move(model)), priors_(priors), stream_(std::move(stream)) {}

  double next_log_stat() override {
    const double score = classifier_score(model_, stream_->next().x);
    log_stat_ = std::max(log_stat_, 0.0) + std::log(label_shift_ratio(score, priors_));
    return log_stat_;
  }

 private:
  Classifier model_;
  LabelShiftPriors priors_;
  std::unique_ptr<ObservationStream> stream_;
  double log_stat_ = 0.0;
};

}  // namespace

Classifier train_classifier(const GaussianMixtureSpec& spec, ClassifierKind kind, std::size_t m,
                            std::uint64_t seed) {
  const auto train = sample_training_set(spec, m, seed);
  const double prior = label_frequency(train);
  if (!(prior > 0.0 && prior < 1.0)) {
    throw InputError("training set of size " + std::to_string(m) + " contains a single class");
  }
  if (kind == ClassifierKind::Lda) return fit_lda(train, prior);
  return fit_qda(train, prior);
}

Procedure trained_procedure(const ScenarioPreset& preset, ClassifierKind kind, std::size_t m) {
  const LabelShiftPriors priors = preset_priors(preset);
  auto spec = std::make_shared<const GaussianMixtureSpec>(preset.pre);
  return [spec, kind, m, priors, sampler = preset_sampler(preset)](std::uint64_t seed,
                                                                    Regime regime) {
    Classifier model = train_classifier(*spec, kind, m, derive_seed(seed, kTrainingStream));
    return std::unique_ptr<Replication>(
        std::make_unique<TrainedReplication>(std::move(model), priors, sampler(seed, regime)));
  };
}

CellResult classifier_cell(const std::string& name, const ScenarioPreset& preset,
                           ClassifierKind kind, std::size_t m, const CellOptions& options) {
  return evaluate_procedure(name, trained_procedure(preset, kind, m), options);
}

namespace {

ReportEntry entry(const CellResult& cell) { return {cell.name, cell.oc}; }

std::vector<ComparisonReport> scenario1(const CellOptions& options) {
  std::vector<ComparisonReport> reports;
  for (const char* cov : {"s1a", "s1b", "s1c"}) {
    std::vector<ReportEntry> rows;
    const auto& base = find_preset(std::string("scenario1-") + cov + "-m1000");
    rows.push_back(entry(evaluate_procedure("optimal CUSUM", optimal_procedure(base), options)));
    for (std::size_t m : {200u, 1000u, 5000u}) {
      const auto& preset = find_preset(std::string("scenario1-") + cov + "-m" + std::to_string(m));
      rows.push_back(entry(classifier_cell("LDA CUSUM m=" + std::to_string(m), preset,
                                           ClassifierKind::Lda, m, options)));
    }
    reports.push_back(relative_comparison_report(std::move(rows),
                                                 std::string("scenario1 class-1 covariance ") + cov));
  }
  return reports;
}

std::vector<ComparisonReport> scenario2(const CellOptions& options) {
  std::vector<ComparisonReport> reports;
  for (const char* cov : {"s1a", "s1b", "s1c"}) {
    for (const char* shift : {"near", "mid", "far"}) {
      const auto& preset = find_preset(std::string("scenario2-") + cov + "-" + shift);
      std::vector<ReportEntry> rows;
      rows.push_back(entry(evaluate_procedure("optimal CUSUM", optimal_procedure(preset), options)));
      rows.push_back(entry(classifier_cell("LDA CUSUM m=1000", preset, ClassifierKind::Lda,
                                           preset.training_size, options)));
      reports.push_back(relative_comparison_report(std::move(rows), preset.name));
    }
  }
  return reports;
}

std::vector<ComparisonReport> dengue(const CellOptions& options) {
  const auto& preset = find_preset("dengue-abrupt");
  const Classifier model = preset_score_model(preset);
  std::vector<ReportEntry> rows;
  rows.push_back(entry(evaluate_procedure("optimal CUSUM (true labels)", label_procedure(preset),
                                          options)));
  rows.push_back(entry(evaluate_procedure("classifier CUSUM (probability)",
                                          score_procedure(preset, model), options)));
  rows.push_back(entry(evaluate_procedure("classifier CUSUM (binary, 0.33)",
                                          binarized_procedure(preset, model, 0.33), options)));
  rows.push_back(entry(evaluate_procedure("classifier CUSUM (binary, 0.5)",
                                          binarized_procedure(preset, model, 0.5), options)));
  rows.push_back(entry(evaluate_procedure("mixture CUSUM [0.6, 0.8]",
                                          mixture_procedure(preset, model, MixtureConfig{}),
                                          options)));
  return {relative_comparison_report(std::move(rows), "dengue-analogue abrupt change")};
}

}  // namespace

std::vector<ComparisonReport> reproduce_table(const std::string& table, std::uint64_t budget,
                                              const CellOptions& base) {
  CellOptions options = base;
  options.calibration_reps = std::max<std::uint64_t>(budget, 2);
  options.delay_reps = std::max<std::uint64_t>(budget, 2);
  if (table == "scenario1") return scenario1(options);
  if (table == "scenario2") return scenario2(options);
  if (table == "dengue-analogue") return dengue(options);
  throw InputError("unknown table '" + table +
                   "'; expected scenario1, scenario2 or dengue-analogue");
}

}  // namespace labelshift
