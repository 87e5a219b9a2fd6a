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

#include "labelshift/ratio.hpp"

namespace labelshift {

// Bernoulli CUSUM on an integer lattice: each observation moves the log
// statistic up by up_steps * step_size with probability hit1 and down by
// down_steps * step_size otherwise, floored at 0 (R = 1) and absorbed once
// it reaches log A.
struct BinaryChainSpec {
  int up_steps = 1;
  int down_steps = 1;
  double step_size = 1.0;
  double hit1 = 0.5;
  double threshold = 2.0;

  // Throws InputError unless steps >= 0, step_size > 0, hit1 in [0,1], A > 1.
  void validate() const;
  double log_up() const { return up_steps * step_size; }
  double log_down() const { return -down_steps * step_size; }
};

// Lattice height h = ceil(log A / step): states 0..h-1 are transient.
std::int64_t threshold_height(const BinaryChainSpec& spec);

// Expected hitting time of log A from R_0 = init_x (snapped down to the
// lattice, below A). +inf when the threshold is unreachable. Throws
// InputError beyond 10^6 states.
double bernoulli_exact_ect(const BinaryChainSpec& spec, double init_x = 1.0);

// Commensurate lattice for label ratios pi_0/pi_inf (up) and
// (1-pi_0)/(1-pi_inf) (down): up/down is the best rational approximation of
// the log ratio with denominator at most max_steps, and step_size makes the
// up move exact.
struct Lattice {
  int up_steps;
  int down_steps;
  double step_size;
};
Lattice lattice_from_priors(const LabelShiftPriors& priors, int max_steps = 16);

}  // namespace labelshift
