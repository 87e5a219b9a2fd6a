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
#include <utility>
#include <vector>

#include "labelshift/detector.hpp"

namespace labelshift {

// Mixing weight over the candidate post-change prevalences Pi0 = [a, b].
struct MixtureWeight {
  enum class Kind { Uniform, PointMass, Custom };
  Kind kind = Kind::Uniform;
  double point = 0.0;                // Kind::PointMass
  std::vector<double> nodes;         // Kind::Custom
  std::vector<double> node_weights;  // Kind::Custom, normalized on use

  static MixtureWeight uniform() { return {}; }
  static MixtureWeight point_mass(double pi0) { return {Kind::PointMass, pi0, {}, {}}; }
  static MixtureWeight custom(std::vector<double> nodes, std::vector<double> weights) {
    return {Kind::Custom, 0.0, std::move(nodes), std::move(weights)};
  }
};

struct MixtureConfig {
  double pi0_min = 0.6;
  double pi0_max = 0.8;
  MixtureWeight weight = MixtureWeight::uniform();
  int n_quad = 21;
  int window = 200;  // m_alpha
  double pi_inf = 0.5;
  double threshold = 2.0;

  // Throws InputError on an empty or out-of-range interval, a point mass or
  // custom node outside it, non-positive window / node count, or bad weights.
  void validate() const;
};

// Quadrature nodes and log-weights realizing the mixing integral. Uniform
// weight uses the midpoint rule with n_quad equally spaced nodes; a
// degenerate interval collapses to one node of weight 1.
struct MixtureQuadrature {
  std::vector<double> nodes;
  std::vector<double> log_weights;

  static MixtureQuadrature build(const MixtureConfig& config);
};

// log lambda_hat_{pi0_j}(score) at every quadrature node.
std::vector<double> per_pi0_log_ratios(double score, const MixtureConfig& config);

// Ring buffer of the last window+1 per-node log ratios.
class MixtureState {
 public:
  static MixtureState initial(const MixtureConfig& config);

  std::uint64_t t() const { return t_; }
  std::size_t n_nodes() const { return quad_.nodes.size(); }
  std::size_t slots() const { return slots_; }
  const MixtureQuadrature& quadrature() const { return quad_; }

  // Per-node log ratios of observation i (1-based), which must still be
  // inside the buffer: t - window <= i <= t.
  std::span<const double> row(std::uint64_t i) const;

  // Log statistic recomputed from the buffer contents.
  double recompute_log_statistic() const;

 private:
  friend std::pair<MixtureState, double> update_mixture(MixtureState, const MixtureConfig&, double);
  friend double push_mixture(MixtureState&, const MixtureConfig&, double);

  MixtureQuadrature quad_;
  std::size_t slots_ = 0;
  std::uint64_t t_ = 0;
  std::vector<double> buffer_;   // slots_ x n_nodes, row-major
  std::vector<double> scratch_;  // suffix sums for the current k
  std::vector<double> bounds_;   // per-k upper bounds
};

// Appends one score and returns the new state together with
//   log R~_t = log max_{max(1,t-m) <= k <= t} sum_j w_j prod_{i=k}^t lambda_{pi0_j}(X_i).
std::pair<MixtureState, double> update_mixture(MixtureState state, const MixtureConfig& config,
                                               double score);

// In-place variant of update_mixture for hot loops.
double push_mixture(MixtureState& state, const MixtureConfig& config, double score);

RunResult run_mixture_detector(const MixtureConfig& config, std::span<const double> scores,
                               std::uint64_t cap, bool keep_trajectory = false);

}  // namespace labelshift
