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

#include <span>

namespace labelshift {

// Class-1 prevalence before (pi_inf) and after (pi_0) the change.
struct LabelShiftPriors {
  double pi_inf = 0.5;
  double pi_0 = 0.5;

  // Throws InputError unless both priors lie strictly inside (0,1).
  void validate() const;

  // lambda(s) = slope * s + intercept
  double slope() const { return pi_0 / pi_inf - (1.0 - pi_0) / (1.0 - pi_inf); }
  double intercept() const { return (1.0 - pi_0) / (1.0 - pi_inf); }
};

// Estimated likelihood ratio from a classifier score s = P_inf(Y=1 | x):
//   (pi_0/pi_inf - (1-pi_0)/(1-pi_inf)) * s + (1-pi_0)/(1-pi_inf).
// Scores 0 and 1 are legal. Throws InputError for scores outside [0,1].
double label_shift_ratio(double score, const LabelShiftPriors& priors);

// Likelihood ratio of an observed label: the score ratio evaluated at the
// label itself, so it agrees bit-for-bit with label_shift_ratio(0 or 1).
double binary_label_ratio(int label, const LabelShiftPriors& priors);

// Callable form of label_shift_ratio with validated priors.
class ScoreRatioModel {
 public:
  explicit ScoreRatioModel(LabelShiftPriors priors);

  double operator()(double score) const { return label_shift_ratio(score, priors_); }
  const LabelShiftPriors& priors() const { return priors_; }

 private:
  LabelShiftPriors priors_;
};

// N(0,1) -> N(mu,1) mean shift with estimated post-change mean.
struct GaussianShiftModel {
  double mu_hat = 0.0;
};

// exp(mu_hat * x - mu_hat^2 / 2)
double gaussian_shift_ratio(double x, const GaussianShiftModel& model);
inline double gaussian_shift_log_ratio(double x, const GaussianShiftModel& model) {
  return model.mu_hat * x - 0.5 * model.mu_hat * model.mu_hat;
}

// mu_hat = sample mean of a post-change training sample. Throws on empty input.
GaussianShiftModel fit_gaussian_mean(std::span<const double> train);

}  // namespace labelshift
