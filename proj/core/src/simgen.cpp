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

#include "labelshift/simgen.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "labelshift/errors.hpp"
#include "labelshift/stats.hpp"

namespace labelshift {

GaussianMixtureSpec GaussianMixtureSpec::with_prevalence(double p) const {
  GaussianMixtureSpec out = *this;
  out.prevalence = p;
  return out;
}

bool GaussianMixtureSpec::same_class_conditionals(const GaussianMixtureSpec& other) const {
  return mu0.size() == other.mu0.size() && mu0 == other.mu0 && mu1 == other.mu1 &&
         sigma0 == other.sigma0 && sigma1 == other.sigma1;
}

GaussianMixture::GaussianMixture(GaussianMixtureSpec spec) : spec_(std::move(spec)) {
  const auto d = spec_.dim();
  if (d == 0 || spec_.mu1.size() != d || spec_.sigma0.rows() != d || spec_.sigma0.cols() != d ||
      spec_.sigma1.rows() != d || spec_.sigma1.cols() != d) {
    throw InputError("Gaussian mixture parameters have inconsistent dimensions");
  }
  if (!(spec_.prevalence > 0.0 && spec_.prevalence < 1.0)) {
    throw InputError("mixture prevalence must lie in (0,1), got " +
                     std::to_string(spec_.prevalence));
  }
  const Eigen::MatrixXd* sig[2] = {&spec_.sigma0, &spec_.sigma1};
  for (int c = 0; c < 2; ++c) {
    if (!sig[c]->isApprox(sig[c]->transpose(), 1e-12)) {
      throw InputError("class covariance must be symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(*sig[c]);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("class-" + std::to_string(c) + " covariance is not positive definite");
    }
    chol_[c] = llt.matrixL();
    log_norm_[c] = -chol_[c].diagonal().array().log().sum() -
                   0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi);
  }
}

void GaussianMixture::sample_class(int y, Rng& rng, Eigen::VectorXd& out) const {
  const auto d = dim();
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < d; ++i) z[i] = rng.normal();
  out.resize(d);
  out.noalias() = chol_[y].triangularView<Eigen::Lower>() * z;
  out += y == 1 ? spec_.mu1 : spec_.mu0;
}

double GaussianMixture::class_log_density(int y, const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw InputError("observation dimension does not match the mixture");
  const Eigen::VectorXd diff = x - (y == 1 ? spec_.mu1 : spec_.mu0);
  const Eigen::VectorXd z = chol_[y].triangularView<Eigen::Lower>().solve(diff);
  return log_norm_[y] - 0.5 * z.squaredNorm();
}

double GaussianMixture::log_density(const Eigen::VectorXd& x, double prevalence) const {
  return log_add_exp(std::log(prevalence) + class_log_density(1, x),
                     std::log1p(-prevalence) + class_log_density(0, x));
}

double GaussianMixture::posterior(const Eigen::VectorXd& x) const {
  const double p = spec_.prevalence;
  return logistic(std::log(p) - std::log1p(-p) + class_log_density(1, x) -
                  class_log_density(0, x));
}

double path_prevalence(double pre, double post, const PrevalencePath& path, std::uint64_t offset) {
  if (path.kind == PrevalencePath::Kind::Abrupt || offset >= path.length) return post;
  const double frac = static_cast<double>(offset) / static_cast<double>(path.length);
  return pre + (post - pre) * frac;
}

namespace {

class MixtureStream final : public ObservationStream {
 public:
  MixtureStream(const GaussianMixture& pre, const GaussianMixture& post, PrevalencePath path,
                std::uint64_t nu, std::uint64_t seed)
      : pre_(pre), post_(post), path_(path), nu_(nu), rng_(seed) {
    obs_.x.resize(pre.dim());
  }

  const Observation& next() override {
    ++t_;
    if (t_ <= nu_) {
      obs_.y = rng_.bernoulli(pre_.spec().prevalence) ? 1 : 0;
      pre_.sample_class(obs_.y, rng_, obs_.x);
    } else {
      const double p = path_prevalence(pre_.spec().prevalence, post_.spec().prevalence, path_,
                                       t_ - nu_);
      obs_.y = rng_.bernoulli(p) ? 1 : 0;
      post_.sample_class(obs_.y, rng_, obs_.x);
    }
    return obs_;
  }

  std::uint64_t t() const { return t_; }

 private:
  const GaussianMixture& pre_;
  const GaussianMixture& post_;
  PrevalencePath path_;
  std::uint64_t nu_;
  Rng rng_;
  std::uint64_t t_ = 0;
  Observation obs_;
};

void check_path(const PrevalencePath& path) {
  if (path.kind == PrevalencePath::Kind::GradualLinear && path.length < 1) {
    throw InputError("gradual prevalence ramp length must be at least 1");
  }
}

}  // namespace

std::vector<StreamPoint> sample_stream(const StreamSpec& spec) {
  if (spec.changepoint_nu > spec.length) {
    throw InputError("changepoint " + std::to_string(spec.changepoint_nu) +
                     " lies beyond the stream length " + std::to_string(spec.length));
  }
  check_path(spec.path);
  const GaussianMixture pre(spec.pre);
  const GaussianMixture post(spec.post);
  if (pre.dim() != post.dim()) throw InputError("pre and post mixtures differ in dimension");
  MixtureStream stream(pre, post, spec.path, spec.changepoint_nu, spec.seed);
  std::vector<StreamPoint> out;
  out.reserve(spec.length);
  for (std::uint64_t t = 1; t <= spec.length; ++t) {
    const Observation& o = stream.next();
    out.push_back({o.x, o.y, t <= spec.changepoint_nu ? Regime::Pre : Regime::Post});
  }
  return out;
}

std::vector<LabeledSample> sample_training_set(const GaussianMixtureSpec& spec, std::size_t m,
                                               std::uint64_t seed) {
  if (m == 0) throw InputError("training set size must be at least 1");
  const GaussianMixture mix(spec);
  Rng rng(seed);
  std::vector<LabeledSample> out(m);
  for (auto& s : out) {
    s.y = rng.bernoulli(spec.prevalence) ? 1 : 0;
    mix.sample_class(s.y, rng, s.x);
  }
  return out;
}

double mixture_log_lr(const GaussianMixture& pre, const GaussianMixture& post,
                      const Eigen::VectorXd& x) {
  return post.log_density(x) - pre.log_density(x);
}

double true_scenario1_lr(const Eigen::VectorXd& x, const GaussianMixtureSpec& pre,
                         const GaussianMixtureSpec& post) {
  if (!pre.same_class_conditionals(post)) {
    throw InputError("pre- and post-change class conditionals differ; the label-shift ratio "
                     "does not apply");
  }
  const GaussianMixture mix(pre);
  const double l1 = mix.class_log_density(1, x);
  const double l0 = mix.class_log_density(0, x);
  const double num = log_add_exp(std::log(post.prevalence) + l1, std::log1p(-post.prevalence) + l0);
  const double den = log_add_exp(std::log(pre.prevalence) + l1, std::log1p(-pre.prevalence) + l0);
  return std::exp(num - den);
}

namespace {

struct SharedMixturePair {
  GaussianMixture pre, post;
};

class OwningMixtureStream final : public ObservationStream {
 public:
  OwningMixtureStream(std::shared_ptr<const SharedMixturePair> pair, PrevalencePath path,
                      Regime regime, std::uint64_t seed)
      : pair_(std::move(pair)),
        inner_(pair_->pre, pair_->post, path,
               regime == Regime::Pre ? UINT64_MAX : 0, seed) {}
  const Observation& next() override { return inner_.next(); }

 private:
  std::shared_ptr<const SharedMixturePair> pair_;
  MixtureStream inner_;
};

class GaussianShiftStream final : public ObservationStream {
 public:
  GaussianShiftStream(double mean, std::uint64_t seed) : mean_(mean), rng_(seed) {
    obs_.x.resize(1);
  }
  const Observation& next() override {
    obs_.x[0] = mean_ + rng_.normal();
    return obs_;
  }

 private:
  double mean_;
  Rng rng_;
  Observation obs_;
};

class LabelStream final : public ObservationStream {
 public:
  LabelStream(double p, std::uint64_t seed) : p_(p), rng_(seed) {}
  const Observation& next() override {
    obs_.y = rng_.bernoulli(p_) ? 1 : 0;
    return obs_;
  }

 private:
  double p_;
  Rng rng_;
  Observation obs_;
};

}  // namespace

StreamSampler make_mixture_sampler(const GaussianMixture& pre, const GaussianMixture& post,
                                   PrevalencePath path) {
  if (pre.dim() != post.dim()) throw InputError("pre and post mixtures differ in dimension");
  check_path(path);
  auto pair = std::make_shared<const SharedMixturePair>(SharedMixturePair{pre, post});
  return [pair, path](std::uint64_t seed, Regime regime) -> std::unique_ptr<ObservationStream> {
    return std::make_unique<OwningMixtureStream>(pair, path, regime, seed);
  };
}

StreamSampler make_gaussian_shift_sampler(double mu) {
  return [mu](std::uint64_t seed, Regime regime) -> std::unique_ptr<ObservationStream> {
    return std::make_unique<GaussianShiftStream>(regime == Regime::Pre ? 0.0 : mu, seed);
  };
}

StreamSampler make_label_sampler(double p_pre, double p_post) {
  if (!(p_pre >= 0.0 && p_pre <= 1.0 && p_post >= 0.0 && p_post <= 1.0)) {
    throw InputError("label probabilities must lie in [0,1]");
  }
  return [p_pre, p_post](std::uint64_t seed, Regime regime) -> std::unique_ptr<ObservationStream> {
    return std::make_unique<LabelStream>(regime == Regime::Pre ? p_pre : p_post, seed);
  };
}

namespace {

Eigen::VectorXd filled(Eigen::Index d, double v) { return Eigen::VectorXd::Constant(d, v); }

Eigen::MatrixXd sym2(double diag, double off) {
  Eigen::MatrixXd m(2, 2);
  m << diag, off, off, diag;
  return m;
}

GaussianMixtureSpec mixture2(Eigen::VectorXd mu0, Eigen::VectorXd mu1, Eigen::MatrixXd sigma1,
                             double prevalence) {
  return {std::move(mu0), std::move(mu1), Eigen::MatrixXd::Identity(2, 2), std::move(sigma1),
          prevalence};
}

std::vector<ScenarioPreset> build_presets() {
  std::vector<ScenarioPreset> out;
  const std::pair<const char*, Eigen::MatrixXd> covs[] = {
      {"s1a", sym2(1.0, 0.0)}, {"s1b", sym2(2.0, 0.1)}, {"s1c", sym2(4.0, 0.5)}};

  for (const auto& [tag, sigma1] : covs) {
    const auto pre = mixture2(filled(2, 0.0), filled(2, 1.5), sigma1, 0.4);
    for (std::size_t m : {200u, 1000u, 5000u}) {
      ScenarioPreset p;
      p.name = std::string("scenario1-") + tag + "-m" + std::to_string(m);
      p.description = "label shift 0.4 -> 0.7, class-1 covariance " + std::string(tag) +
                      ", training size " + std::to_string(m);
      p.pre = pre;
      p.post = pre.with_prevalence(0.7);
      p.training_size = m;
      out.push_back(std::move(p));
    }
  }

  struct MeanPair {
    const char* tag;
    double mu00, mu01;
  };
  const MeanPair pairs[] = {{"near", 0.5, 1.0}, {"mid", 0.75, 0.75}, {"far", 1.0, 0.5}};
  for (const auto& [tag, sigma1] : covs) {
    const auto pre = mixture2(filled(2, 0.0), filled(2, 1.5), sigma1, 0.4);
    for (const auto& mp : pairs) {
      ScenarioPreset p;
      p.name = std::string("scenario2-") + tag + "-" + mp.tag;
      p.description = "prevalence 0.4 -> 0.7 with moved class means (" + std::string(mp.tag) +
                      "), class-1 covariance " + tag;
      p.pre = pre;
      p.post = mixture2(filled(2, mp.mu00), filled(2, mp.mu01), sigma1, 0.7);
      p.training_size = 1000;
      out.push_back(std::move(p));
    }
  }

  for (const bool gradual : {false, true}) {
    ScenarioPreset p;
    p.name = gradual ? "dengue-gradual" : "dengue-abrupt";
    p.description = std::string("synthetic prevalence change 0.3 -> 0.68, ") +
                    (gradual ? "linear over 100 observations" : "abrupt");
    p.pre = mixture2(filled(2, 0.0), filled(2, 0.84), Eigen::MatrixXd::Identity(2, 2), 0.3);
    p.post = p.pre.with_prevalence(0.68);
    p.path = gradual ? PrevalencePath::gradual(100) : PrevalencePath::abrupt();
    p.training_size = 1000;
    p.fixed_score_prior = 0.33;
    out.push_back(std::move(p));
  }

  {
    constexpr Eigen::Index d = 10;
    Eigen::VectorXd scale(d);
    for (Eigen::Index i = 0; i < d; ++i) scale[i] = i % 2 == 0 ? 1.5 : 1.0 / 1.5;
    ScenarioPreset p;
    p.name = "example3-d10";
    p.description = "d=10 label shift 0.4 -> 0.7 with unequal class covariances";
    p.pre = {filled(d, 0.0), filled(d, 0.5), Eigen::MatrixXd::Identity(d, d),
             Eigen::MatrixXd(scale.asDiagonal()), 0.4};
    p.post = p.pre.with_prevalence(0.7);
    p.training_size = 1000;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

const std::vector<ScenarioPreset>& scenario_presets() {
  static const std::vector<ScenarioPreset> presets = build_presets();
  return presets;
}

const ScenarioPreset& find_preset(const std::string& name) {
  for (const auto& p : scenario_presets()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : scenario_presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw InputError("unknown scenario preset '" + name + "'; known presets: " + known);
}

}  // namespace labelshift
