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

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "labelshift/classifiers.hpp"
#include "labelshift/rng.hpp"
#include "labelshift/stream.hpp"

namespace labelshift {

// X ~ prevalence * N(mu1, sigma1) + (1 - prevalence) * N(mu0, sigma0)
struct GaussianMixtureSpec {
  Eigen::VectorXd mu0, mu1;
  Eigen::MatrixXd sigma0, sigma1;
  double prevalence = 0.5;

  Eigen::Index dim() const { return mu0.size(); }
  // Same class conditionals, different prevalence.
  GaussianMixtureSpec with_prevalence(double p) const;
  bool same_class_conditionals(const GaussianMixtureSpec& other) const;
};

// Validated mixture with cached Cholesky factors, used for sampling and for
// exact density evaluation.
class GaussianMixture {
 public:
  // Throws InputError on dimension mismatch or a prevalence outside (0,1),
  // NumericalError if a covariance is not SPD.
  explicit GaussianMixture(GaussianMixtureSpec spec);

  const GaussianMixtureSpec& spec() const { return spec_; }
  Eigen::Index dim() const { return spec_.dim(); }

  // x = mu_y + L_y z with z standard normal.
  void sample_class(int y, Rng& rng, Eigen::VectorXd& out) const;

  // Full log N(x; mu_y, sigma_y).
  double class_log_density(int y, const Eigen::VectorXd& x) const;
  double log_density(const Eigen::VectorXd& x, double prevalence) const;
  double log_density(const Eigen::VectorXd& x) const { return log_density(x, spec_.prevalence); }
  // Exact P(Y = 1 | x) at the mixture's own prevalence.
  double posterior(const Eigen::VectorXd& x) const;

 private:
  GaussianMixtureSpec spec_;
  Eigen::MatrixXd chol_[2];
  double log_norm_[2] = {0.0, 0.0};
};

// How prevalence moves after the changepoint.
struct PrevalencePath {
  enum class Kind { Abrupt, GradualLinear };
  Kind kind = Kind::Abrupt;
  std::uint64_t length = 1;  // GradualLinear ramp length

  static PrevalencePath abrupt() { return {}; }
  static PrevalencePath gradual(std::uint64_t length) { return {Kind::GradualLinear, length}; }
};

// Prevalence `offset` >= 1 observations after the changepoint. The gradual
// path moves linearly and reaches the post value at offset == length.
double path_prevalence(double pre, double post, const PrevalencePath& path, std::uint64_t offset);

struct StreamSpec {
  GaussianMixtureSpec pre, post;
  std::uint64_t changepoint_nu = 0;
  PrevalencePath path;
  std::uint64_t length = 0;
  std::uint64_t seed = 0;
};

struct StreamPoint {
  Eigen::VectorXd x;
  int y = 0;
  Regime regime = Regime::Pre;
};

// Observations 1..nu from `pre`, later ones from `post` class conditionals
// with prevalence following the path. Labels are drawn first, then features.
std::vector<StreamPoint> sample_stream(const StreamSpec& spec);

// m iid labeled draws from the mixture. Throws InputError when m == 0.
std::vector<LabeledSample> sample_training_set(const GaussianMixtureSpec& spec, std::size_t m,
                                               std::uint64_t seed);

// log f_post(x) - log f_pre(x) for two arbitrary Gaussian mixtures.
double mixture_log_lr(const GaussianMixture& pre, const GaussianMixture& post,
                      const Eigen::VectorXd& x);

// Exact label-shift likelihood ratio
//   (pi0 f1 + (1-pi0) f0) / (pi_inf f1 + (1-pi_inf) f0).
// Throws InputError if pre and post do not share class conditionals.
double true_scenario1_lr(const Eigen::VectorXd& x, const GaussianMixtureSpec& pre,
                         const GaussianMixtureSpec& post);

// Replication sampler over a pre/post mixture pair. Regime::Pre draws every
// observation from `pre`; Regime::Post starts post-change at t = 1 and
// follows `path` from pre to post prevalence.
StreamSampler make_mixture_sampler(const GaussianMixture& pre, const GaussianMixture& post,
                                   PrevalencePath path = PrevalencePath::abrupt());

// One-dimensional N(0,1) before / N(mu,1) after the change.
StreamSampler make_gaussian_shift_sampler(double mu);

// Label-only stream: y ~ Bernoulli(p_pre) or Bernoulli(p_post), x empty.
StreamSampler make_label_sampler(double p_pre, double p_post);

// ---------------------------------------------------------------------------
// Named scenario presets.

struct ScenarioPreset {
  std::string name;
  std::string description;
  GaussianMixtureSpec pre, post;
  PrevalencePath path;
  std::size_t training_size = 0;
  // When set, the scenario ships a fixed scoring model: the LDA posterior at
  // the true class parameters with this prior plugged in.
  std::optional<double> fixed_score_prior;

  double pi_inf() const { return pre.prevalence; }
  double pi_0() const { return post.prevalence; }
  bool label_shift() const { return pre.same_class_conditionals(post); }
};

// scenario1-{s1a,s1b,s1c}-m{200,1000,5000}, scenario2-{s1a,s1b,s1c}-{near,mid,far},
// dengue-abrupt, dengue-gradual, example3-d10.
const std::vector<ScenarioPreset>& scenario_presets();
const ScenarioPreset& find_preset(const std::string& name);

}  // namespace labelshift
