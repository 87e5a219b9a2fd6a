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

#include "labelshift/detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "labelshift/errors.hpp"

namespace labelshift {

double apply_update_rule(UpdateRule rule, double r) {
  switch (rule) {
    case UpdateRule::Cusum:
      return std::max(1.0, r);
    case UpdateRule::ShiryaevRoberts:
      return 1.0 + r;
  }
  return r;
}

double log_update_rule(UpdateRule rule, double log_r) {
  switch (rule) {
    case UpdateRule::Cusum:
      return std::max(0.0, log_r);
    case UpdateRule::ShiryaevRoberts:
      // log(1 + e^l)
      if (log_r > 0.0) return log_r + std::log1p(std::exp(-log_r));
      return std::log1p(std::exp(log_r));
  }
  return log_r;
}

void DetectorConfig::validate() const {
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw InputError("detector threshold must be positive and finite, got " +
                     std::to_string(threshold));
  }
  if (!(init_x >= 0.0) || !std::isfinite(init_x)) {
    throw InputError("detector initial value must be nonnegative, got " + std::to_string(init_x));
  }
  if (!(threshold > init_x)) {
    throw InputError("detector threshold " + std::to_string(threshold) +
                     " must exceed the initial value " + std::to_string(init_x));
  }
}

DetectorState DetectorState::initial(const DetectorConfig& config) {
  return {std::log(config.init_x), 0};
}

DetectorState update_detector(DetectorState state, const DetectorConfig& config, double lr) {
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw InputError("likelihood ratio must be finite and positive, got " + std::to_string(lr));
  }
  return update_detector_log(state, config, std::log(lr));
}

DetectorState update_detector_log(DetectorState state, const DetectorConfig& config,
                                  double log_lr) {
  state.log_stat = log_update_rule(config.rule, state.log_stat) + log_lr;
  ++state.t;
  return state;
}

RunResult run_detector(const DetectorConfig& config, std::span<const double> lrs,
                       std::uint64_t cap, bool keep_trajectory) {
  config.validate();
  if (cap < 1) throw InputError("run cap must be at least 1");

  const double log_a = std::log(config.threshold);
  DetectorState state = DetectorState::initial(config);
  RunResult result;
  for (double lr : lrs) {
    if (state.t >= cap) break;
    state = update_detector(state, config, lr);
    if (keep_trajectory) result.trajectory.push_back(state.log_stat);
    if (crossed(state.log_stat, log_a)) {
      result.stopped = true;
      break;
    }
  }
  result.stopping_time = state.t;
  result.final_log_stat = state.log_stat;
  return result;
}

}  // namespace labelshift
