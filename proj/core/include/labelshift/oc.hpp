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
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "labelshift/detector.hpp"
#include "labelshift/mixture.hpp"
#include "labelshift/stream.hpp"

namespace labelshift {

// Monte Carlo summary of a stopping time. Censored replications enter the
// mean at the cap, so with censoring the mean underestimates E[T].
struct RunLengthSummary {
  double mean = 0.0;
  double se = 0.0;  // sd / sqrt(n)
  double sd = 0.0;
  std::uint64_t n = 0;
  std::uint64_t n_censored = 0;
  std::uint64_t cap = 0;

  bool empty() const { return n == 0; }
  // Summary of the concatenated samples of several summaries.
  static RunLengthSummary pool(std::span<const RunLengthSummary> parts);
};

// ARL (pre-change regime) and ADD (all data post-change) at one threshold.
// A summary with n == 0 was not estimated.
struct OperatingCharacteristics {
  double threshold = 0.0;
  RunLengthSummary arl;
  RunLengthSummary add;
};

struct MonteCarloOptions {
  std::uint64_t n_reps = 2000;
  std::uint64_t cap = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// One replication of a detection procedure: the sequence log R_1, log R_2, ...
// The trajectory does not depend on the threshold, which is what lets a
// single simulated path answer every threshold at once.
class Replication {
 public:
  virtual ~Replication() = default;
  virtual double next_log_stat() = 0;
};

// Builds the replication for a given seed and regime. Must be deterministic
// and safe to call concurrently.
using Procedure = std::function<std::unique_ptr<Replication>(std::uint64_t, Regime)>;

using LogRatioFn = std::function<double(const Observation&)>;
using ScoreFn = std::function<double(const Observation&)>;

// R_t = Psi(R_{t-1}) * lambda(X_t) with R_0 = init_x.
Procedure make_recursive_procedure(UpdateRule rule, double init_x, StreamSampler sampler,
                                   LogRatioFn log_lr);

// Window-limited mixture statistic fed by classifier scores. The threshold
// field of `config` is ignored.
Procedure make_mixture_procedure(MixtureConfig config, StreamSampler sampler, ScoreFn score);

// Stopping time of `n_reps` replications with seeds seed, seed+1, ... at
// log threshold `log_threshold`. Throws InputError if n_reps < 2 or cap < 1
// and NumericalError if every replication is censored.
RunLengthSummary estimate_run_length(const Procedure& procedure, double log_threshold,
                                     Regime regime, const MonteCarloOptions& options);

// ARL and ADD at threshold A, each regime with its own options.
OperatingCharacteristics estimate_oc(const Procedure& procedure, double threshold,
                                     const MonteCarloOptions& arl_options,
                                     const MonteCarloOptions& add_options);

// Pre-change running-maximum records of every replication, simulated until
// the statistic passes `log_ceiling` or the cap. Answers ARL(A) for any
// log A <= log_ceiling exactly as a direct simulation with the same seeds.
class RecordsCurve {
 public:
  RecordsCurve(const Procedure& procedure, double log_ceiling, const MonteCarloOptions& options);

  double log_ceiling() const { return log_ceiling_; }
  // Throws InputError for log_threshold above the ceiling.
  RunLengthSummary arl(double log_threshold) const;

 private:
  struct Record {
    std::uint64_t t;
    double log_max;
  };
  double log_ceiling_;
  std::uint64_t cap_;
  std::vector<std::vector<Record>> records_;
};

struct CalibrationOptions {
  double tol_rel = 0.02;
  std::uint64_t n_reps = 2000;
  std::uint64_t cap = 0;  // 0 = 20 x target
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct CalibrationResult {
  double threshold = 0.0;
  double log_threshold = 0.0;
  RunLengthSummary arl;
  // False when the estimated ARL is a step function that jumps over the
  // tolerance band; the closest attainable threshold is returned.
  bool within_tolerance = false;
};

// Bisection on log A over a common-random-numbers ARL curve, bracketed in
// [1 + 1e-6, 1e9]. Throws InputError for target < 1 or tol_rel <= 0 and
// NumericalError when the target cannot be bracketed.
CalibrationResult calibrate_threshold(const Procedure& procedure, double target_arl,
                                      const CalibrationOptions& options);

}  // namespace labelshift
