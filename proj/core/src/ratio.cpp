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

#include "labelshift/ratio.hpp"

#include <cmath>
#include <string>

#include "labelshift/errors.hpp"
#include "labelshift/stats.hpp"

namespace labelshift {

void LabelShiftPriors::validate() const {
  if (!(pi_inf > 0.0 && pi_inf < 1.0)) {
    throw InputError("pre-change prevalence must lie in (0,1), got " + std::to_string(pi_inf));
  }
  if (!(pi_0 > 0.0 && pi_0 < 1.0)) {
    throw InputError("post-change prevalence must lie in (0,1), got " + std::to_string(pi_0));
  }
}

double label_shift_ratio(double score, const LabelShiftPriors& priors) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw InputError("classifier score must lie in [0,1], got " + std::to_string(score));
  }
  priors.validate();
  return priors.slope() * score + priors.intercept();
}

double binary_label_ratio(int label, const LabelShiftPriors& priors) {
  if (label != 0 && label != 1) {
    throw InputError("label must be 0 or 1, got " + std::to_string(label));
  }
  return label_shift_ratio(static_cast<double>(label), priors);
}

ScoreRatioModel::ScoreRatioModel(LabelShiftPriors priors) : priors_(priors) {
  priors_.validate();
}

double gaussian_shift_ratio(double x, const GaussianShiftModel& model) {
  return std::exp(gaussian_shift_log_ratio(x, model));
}

GaussianShiftModel fit_gaussian_mean(std::span<const double> train) {
  if (train.empty()) throw InputError("cannot estimate a mean from an empty training sample");
  CompensatedSum sum;
  for (double x : train) sum.add(x);
  return {sum.value() / static_cast<double>(train.size())};
}

}  // namespace labelshift
