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

#include "labelshift/bernoulli_chain.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "labelshift/errors.hpp"

namespace labelshift {

namespace {
constexpr std::int64_t kMaxStates = 1'000'000;
}

void BinaryChainSpec::validate() const {
  if (up_steps < 0 || down_steps < 0) throw InputError("lattice steps must be nonnegative");
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw InputError("lattice step size must be finite and positive");
  }
  if (!(hit1 >= 0.0 && hit1 <= 1.0)) throw InputError("hit probability must lie in [0,1]");
  if (!(threshold > 1.0) || !std::isfinite(threshold)) {
    throw InputError("threshold must be finite and greater than 1");
  }
}

std::int64_t threshold_height(const BinaryChainSpec& spec) {
  spec.validate();
  const double h = std::ceil(std::log(spec.threshold) / spec.step_size);
  if (h > static_cast<double>(kMaxStates)) {
    throw InputError("lattice needs " + std::to_string(h) +
                     " states (limit 10^6); use a coarser step");
  }
  return static_cast<std::int64_t>(h);
}

double bernoulli_exact_ect(const BinaryChainSpec& spec, double init_x) {
  const std::int64_t h = threshold_height(spec);
  if (!(init_x >= 0.0) || !(init_x < spec.threshold)) {
    throw InputError("initial statistic must lie in [0, A)");
  }
  const double p = spec.hit1;
  if (p == 0.0 || spec.up_steps == 0) return std::numeric_limits<double>::infinity();
  const auto start = static_cast<std::int64_t>(
      std::floor(std::log(std::max(init_x, 1.0)) / spec.step_size + 1e-9));

  // E_k = 1 + p E_{k+u} + (1-p) E_{max(0, k-d)}, with E = 0 at or above h.
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(3 * h));
  for (std::int64_t k = 0; k < h; ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    double diag = 1.0;
    const std::int64_t up = k + spec.up_steps;
    const std::int64_t down = std::max<std::int64_t>(0, k - spec.down_steps);
    if (up < h) {
      if (up == k) diag -= p; else entries.emplace_back(row, up, -p);
    }
    if (down == k) diag -= 1.0 - p; else entries.emplace_back(row, down, -(1.0 - p));
    entries.emplace_back(row, row, diag);
  }
  Eigen::SparseMatrix<double> system(h, h);
  system.setFromTriplets(entries.begin(), entries.end());
  system.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success) throw NumericalError("Bernoulli chain system is singular");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(h);
  const Eigen::VectorXd ect = lu.solve(ones);
  if (lu.info() != Eigen::Success || !ect.allFinite()) {
    throw NumericalError("Bernoulli chain solve failed");
  }
  return ect[static_cast<Eigen::Index>(start)];
}

Lattice lattice_from_priors(const LabelShiftPriors& priors, int max_steps) {
  priors.validate();
  if (max_steps < 1) throw InputError("max_steps must be at least 1");
  const double up = std::log(priors.pi_0 / priors.pi_inf);
  const double down = -std::log((1.0 - priors.pi_0) / (1.0 - priors.pi_inf));
  if (!(up > 0.0 && down > 0.0)) {
    throw InputError("lattice requires pi_0 > pi_inf so that label 1 raises the statistic");
  }
  // Continued-fraction convergents of up/down.
  const double target = up / down;
  long long p_prev = 1, q_prev = 0, p = static_cast<long long>(std::floor(target)), q = 1;
  double rest = target - std::floor(target);
  Lattice best{static_cast<int>(std::max(p, 1LL)), 1, 0.0};
  while (rest > 1e-12) {
    const double inv = 1.0 / rest;
    const long long a = static_cast<long long>(std::floor(inv));
    rest = inv - static_cast<double>(a);
    const long long p_next = a * p + p_prev, q_next = a * q + q_prev;
    if (p_next > max_steps || q_next > max_steps) break;
    p_prev = p; q_prev = q; p = p_next; q = q_next;
    if (p > 0) best = {static_cast<int>(p), static_cast<int>(q), 0.0};
  }
  best.step_size = up / best.up_steps;
  return best;
}

}  // namespace labelshift
