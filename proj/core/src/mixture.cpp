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

#include "labelshift/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "labelshift/errors.hpp"
#include "labelshift/ratio.hpp"

namespace labelshift {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool in_unit_open(double p) { return p > 0.0 && p < 1.0; }

// Weighted log-sum-exp of suffix sums: log sum_j exp(logw_j + s_j).
double weighted_lse(std::span<const double> log_w, const double* s) {
  double m = kNegInf;
  for (std::size_t j = 0; j < log_w.size(); ++j) m = std::max(m, log_w[j] + s[j]);
  if (m == kNegInf) return m;
  double acc = 0.0;
  for (std::size_t j = 0; j < log_w.size(); ++j) acc += std::exp(log_w[j] + s[j] - m);
  return m + std::log(acc);
}

}  // namespace

void MixtureConfig::validate() const {
  if (!in_unit_open(pi0_min) || !in_unit_open(pi0_max) || pi0_min > pi0_max) {
    throw InputError("post-change prevalence interval must satisfy 0 < a <= b < 1, got [" +
                     std::to_string(pi0_min) + ", " + std::to_string(pi0_max) + "]");
  }
  if (!in_unit_open(pi_inf)) {
    throw InputError("pre-change prevalence must lie in (0,1), got " + std::to_string(pi_inf));
  }
  if (n_quad < 1) throw InputError("mixture needs at least one quadrature node");
  if (window < 1) throw InputError("mixture window must be at least 1");
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw InputError("mixture threshold must be positive and finite");
  }
  switch (weight.kind) {
    case MixtureWeight::Kind::Uniform:
      break;
    case MixtureWeight::Kind::PointMass:
      if (weight.point < pi0_min || weight.point > pi0_max) {
        throw InputError("point-mass prevalence " + std::to_string(weight.point) +
                         " lies outside the mixing interval");
      }
      break;
    case MixtureWeight::Kind::Custom: {
      if (weight.nodes.empty() || weight.nodes.size() != weight.node_weights.size()) {
        throw InputError("custom mixing weight needs matching, nonempty node and weight lists");
      }
      double total = 0.0;
      for (std::size_t j = 0; j < weight.nodes.size(); ++j) {
        if (weight.nodes[j] < pi0_min || weight.nodes[j] > pi0_max) {
          throw InputError("custom mixing node " + std::to_string(weight.nodes[j]) +
                           " lies outside the mixing interval");
        }
        if (!(weight.node_weights[j] >= 0.0)) throw InputError("mixing weights must be >= 0");
        total += weight.node_weights[j];
      }
      if (!(total > 0.0)) throw InputError("mixing weights must not all be zero");
      break;
    }
  }
}

MixtureQuadrature MixtureQuadrature::build(const MixtureConfig& config) {
  config.validate();
  MixtureQuadrature q;
  switch (config.weight.kind) {
    case MixtureWeight::Kind::PointMass:
      q.nodes = {config.weight.point};
      q.log_weights = {0.0};
      break;
    case MixtureWeight::Kind::Uniform:
      if (config.pi0_min == config.pi0_max) {
        q.nodes = {config.pi0_min};
        q.log_weights = {0.0};
        break;
      }
      for (int j = 0; j < config.n_quad; ++j) {
        q.nodes.push_back(config.pi0_min +
                          (j + 0.5) * (config.pi0_max - config.pi0_min) / config.n_quad);
        q.log_weights.push_back(-std::log(static_cast<double>(config.n_quad)));
      }
      break;
    case MixtureWeight::Kind::Custom: {
      const double total = std::accumulate(config.weight.node_weights.begin(),
                                           config.weight.node_weights.end(), 0.0);
      for (std::size_t j = 0; j < config.weight.nodes.size(); ++j) {
        if (config.weight.node_weights[j] == 0.0) continue;
        q.nodes.push_back(config.weight.nodes[j]);
        q.log_weights.push_back(std::log(config.weight.node_weights[j] / total));
      }
      break;
    }
  }
  return q;
}

std::vector<double> per_pi0_log_ratios(double score, const MixtureConfig& config) {
  const MixtureQuadrature q = MixtureQuadrature::build(config);
  std::vector<double> out;
  out.reserve(q.nodes.size());
  for (double pi0 : q.nodes) {
    out.push_back(std::log(label_shift_ratio(score, {config.pi_inf, pi0})));
  }
  return out;
}

MixtureState MixtureState::initial(const MixtureConfig& config) {
  MixtureState s;
  s.quad_ = MixtureQuadrature::build(config);
  s.slots_ = static_cast<std::size_t>(config.window) + 1;
  s.buffer_.assign(s.slots_ * s.quad_.nodes.size(), 0.0);
  s.scratch_.assign(s.slots_ * s.quad_.nodes.size(), 0.0);
  s.bounds_.assign(s.slots_, 0.0);
  return s;
}

std::span<const double> MixtureState::row(std::uint64_t i) const {
  if (i < 1 || i > t_ || t_ - i >= slots_) throw InputError("mixture buffer row out of range");
  const std::size_t n = quad_.nodes.size();
  return {buffer_.data() + ((i - 1) % slots_) * n, n};
}

double MixtureState::recompute_log_statistic() const {
  if (t_ == 0) return kNegInf;
  const std::size_t n = quad_.nodes.size();
  const std::uint64_t k_min = t_ > slots_ - 1 ? t_ - (slots_ - 1) : 1;
  double best = kNegInf;
  for (std::uint64_t k = k_min; k <= t_; ++k) {
    std::vector<double> sums(n, 0.0);
    for (std::uint64_t i = k; i <= t_; ++i) {
      const auto r = row(i);
      for (std::size_t j = 0; j < n; ++j) sums[j] += r[j];
    }
    best = std::max(best, weighted_lse(quad_.log_weights, sums.data()));
  }
  return best;
}

double push_mixture(MixtureState& state, const MixtureConfig& config, double score) {
  if (!(score >= 0.0 && score <= 1.0)) {
    throw InputError("classifier score must lie in [0,1], got " + std::to_string(score));
  }
  const std::size_t n = state.quad_.nodes.size();
  ++state.t_;
  double* dst = state.buffer_.data() + ((state.t_ - 1) % state.slots_) * n;
  for (std::size_t j = 0; j < n; ++j) {
    dst[j] = std::log(label_shift_ratio(score, {config.pi_inf, state.quad_.nodes[j]}));
  }

  // Suffix sums S_j(k) = sum_{i=k}^t log lambda_j(X_i) for every admissible
  // window start, newest first. The weighted mixture at k is bounded above
  // by max_j S_j(k) because the weights sum to one; that bound prunes
  // window starts that cannot beat the best value found so far.
  const std::uint64_t n_starts = std::min<std::uint64_t>(state.t_, state.slots_);
  std::size_t best_idx = 0;
  for (std::uint64_t idx = 0; idx < n_starts; ++idx) {
    const std::uint64_t i = state.t_ - idx;
    const double* src = state.buffer_.data() + ((i - 1) % state.slots_) * n;
    double* sums = state.scratch_.data() + idx * n;
    const double* prev = idx == 0 ? nullptr : sums - n;
    double bound = kNegInf;
    for (std::size_t j = 0; j < n; ++j) {
      sums[j] = (prev ? prev[j] : 0.0) + src[j];
      bound = std::max(bound, sums[j]);
    }
    state.bounds_[idx] = bound;
    if (bound > state.bounds_[best_idx]) best_idx = idx;
  }
  const std::span<const double> log_w(state.quad_.log_weights);
  double best = weighted_lse(log_w, state.scratch_.data() + best_idx * n);
  for (std::uint64_t idx = 0; idx < n_starts; ++idx) {
    if (idx == best_idx || state.bounds_[idx] + 1e-12 < best) continue;
    best = std::max(best, weighted_lse(log_w, state.scratch_.data() + idx * n));
  }
  return best;
}

std::pair<MixtureState, double> update_mixture(MixtureState state, const MixtureConfig& config,
                                               double score) {
  const double stat = push_mixture(state, config, score);
  return {std::move(state), stat};
}

RunResult run_mixture_detector(const MixtureConfig& config, std::span<const double> scores,
                               std::uint64_t cap, bool keep_trajectory) {
  if (cap < 1) throw InputError("run cap must be at least 1");
  MixtureState state = MixtureState::initial(config);
  const double log_a = std::log(config.threshold);
  RunResult result;
  result.final_log_stat = kNegInf;
  for (double s : scores) {
    if (state.t() >= cap) break;
    result.final_log_stat = push_mixture(state, config, s);
    if (keep_trajectory) result.trajectory.push_back(result.final_log_stat);
    if (crossed(result.final_log_stat, log_a)) {
      result.stopped = true;
      break;
    }
  }
  result.stopping_time = state.t();
  return result;
}

}  // namespace labelshift
