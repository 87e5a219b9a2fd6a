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
#include <span>
#include <vector>

namespace labelshift {

// Update function Psi of the recursion R_t = Psi(R_{t-1}) * lambda(X_t).
//   Cusum:            Psi(r) = max(1, r)
//   ShiryaevRoberts:  Psi(r) = 1 + r
enum class UpdateRule { Cusum, ShiryaevRoberts };

// Psi in linear space.
double apply_update_rule(UpdateRule rule, double r);

// log(Psi(exp(log_r))), evaluated without leaving the log domain.
double log_update_rule(UpdateRule rule, double log_r);

struct DetectorConfig {
  UpdateRule rule = UpdateRule::Cusum;
  double threshold = 2.0;  // A
  double init_x = 1.0;     // R_0

  static DetectorConfig cusum(double threshold) { return {UpdateRule::Cusum, threshold, 1.0}; }
  static DetectorConfig shiryaev_roberts(double threshold, double init_x = 0.0) {
    return {UpdateRule::ShiryaevRoberts, threshold, init_x};
  }

  // Throws InputError unless A > 0, x >= 0 and A > x.
  void validate() const;
};

// Detection statistic kept as log R_t so that long runs cannot overflow.
struct DetectorState {
  double log_stat = 0.0;
  std::uint64_t t = 0;

  static DetectorState initial(const DetectorConfig& config);
};

// One step of the recursion with likelihood ratio `lr` (must be finite and
// positive; anything else means the ratio model is broken and throws).
DetectorState update_detector(DetectorState state, const DetectorConfig& config, double lr);

// Same step with the ratio supplied as log(lr). Used on hot paths where the
// model produces the log ratio directly.
DetectorState update_detector_log(DetectorState state, const DetectorConfig& config,
                                  double log_lr);

inline bool crossed(double log_stat, double log_threshold) { return log_stat >= log_threshold; }

struct RunResult {
  bool stopped = false;
  // First t >= 1 with R_t >= A when stopped; otherwise the number of
  // observations consumed (the cap, or the stream length if shorter).
  std::uint64_t stopping_time = 0;
  double final_log_stat = 0.0;
  std::vector<double> trajectory;  // log R_1, ..., log R_T when requested
};

// Runs the recursion over `lrs` until the statistic reaches the threshold or
// `cap` observations have been consumed.
RunResult run_detector(const DetectorConfig& config, std::span<const double> lrs,
                       std::uint64_t cap, bool keep_trajectory = false);

}  // namespace labelshift
