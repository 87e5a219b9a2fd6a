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

#include "labelshift/classifiers.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "labelshift/errors.hpp"
#include "labelshift/stats.hpp"

namespace labelshift {
namespace {

void check_prior(double pi) {
  if (!(pi > 0.0 && pi < 1.0)) {
    throw InputError("classifier prior must lie in (0,1), got " + std::to_string(pi));
  }
}

void check_dim(Eigen::Index expected, const Eigen::VectorXd& x) {
  if (x.size() != expected) {
    throw InputError("feature dimension mismatch: model has " + std::to_string(expected) +
                     ", observation has " + std::to_string(x.size()));
  }
}

Eigen::LLT<Eigen::MatrixXd> factor_spd(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw InputError(std::string(what) + " must be square");
  if (!m.isApprox(m.transpose(), 1e-10)) throw InputError(std::string(what) + " must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-13)) {
    throw NumericalError(std::string(what) +
                         " is singular or not positive definite; more training data or a "
                         "ridge term (FitOptions::ridge / --ridge) is needed");
  }
  return llt;
}

double log_prior_odds(double pi) { return std::log(pi) - std::log1p(-pi); }

struct ClassStats {
  Eigen::Index d = 0;
  std::size_t n[2] = {0, 0};
  Eigen::VectorXd mean[2];
};

ClassStats class_means(std::span<const LabeledSample> train) {
  if (train.empty()) throw InputError("training set is empty");
  ClassStats s;
  s.d = train.front().x.size();
  if (s.d == 0) throw InputError("training vectors have dimension 0");
  s.mean[0] = Eigen::VectorXd::Zero(s.d);
  s.mean[1] = Eigen::VectorXd::Zero(s.d);
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto& sample = train[i];
    if (sample.x.size() != s.d) {
      throw InputError("training sample " + std::to_string(i) + " has dimension " +
                       std::to_string(sample.x.size()) + ", expected " + std::to_string(s.d));
    }
    if (sample.y != 0 && sample.y != 1) {
      throw InputError("training label must be 0 or 1 (sample " + std::to_string(i) + ")");
    }
    s.mean[sample.y] += sample.x;
    ++s.n[sample.y];
  }
  if (s.n[0] == 0 || s.n[1] == 0) {
    throw InputError("training set must contain both classes (class sizes " +
                     std::to_string(s.n[0]) + " and " + std::to_string(s.n[1]) + ")");
  }
  for (int c = 0; c < 2; ++c) s.mean[c] /= static_cast<double>(s.n[c]);
  return s;
}

// Sum of outer products of centered vectors for class c (or both if c < 0).
Eigen::MatrixXd scatter(std::span<const LabeledSample> train, const ClassStats& s, int c) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(s.d, s.d);
  Eigen::VectorXd centered(s.d);
  for (const auto& sample : train) {
    if (c >= 0 && sample.y != c) continue;
    centered = sample.x - s.mean[sample.y];
    out.selfadjointView<Eigen::Lower>().rankUpdate(centered);
  }
  return out.selfadjointView<Eigen::Lower>();
}

}  // namespace

// ---------------------------------------------------------------------------
// LDA

LdaModel::LdaModel(Eigen::VectorXd mu0, Eigen::VectorXd mu1, Eigen::MatrixXd sigma, double pi_inf)
    : mu0_(std::move(mu0)), mu1_(std::move(mu1)), sigma_(std::move(sigma)), pi_inf_(pi_inf) {
  check_prior(pi_inf_);
  if (mu0_.size() != mu1_.size() || sigma_.rows() != mu0_.size()) {
    throw InputError("LDA parameter dimensions disagree");
  }
  const auto llt = factor_spd(sigma_, "pooled covariance");
  direction_ = llt.solve(mu1_ - mu0_);
  offset_ = log_prior_odds(pi_inf_) - 0.5 * (mu1_ + mu0_).dot(direction_);
}

double LdaModel::log_odds(const Eigen::VectorXd& x) const {
  check_dim(dim(), x);
  return offset_ + direction_.dot(x);
}

double LdaModel::score(const Eigen::VectorXd& x) const { return logistic(log_odds(x)); }

LdaModel LdaModel::with_prior(double pi) const { return LdaModel(mu0_, mu1_, sigma_, pi); }

LdaModel fit_lda(std::span<const LabeledSample> train, double pi_inf, FitOptions options) {
  const ClassStats s = class_means(train);
  if (train.size() <= 2) throw InputError("LDA needs more than two training samples");
  Eigen::MatrixXd pooled = scatter(train, s, -1) / static_cast<double>(train.size() - 2);
  pooled.diagonal().array() += options.ridge;
  return LdaModel(s.mean[0], s.mean[1], std::move(pooled), pi_inf);
}

double lda_score(const LdaModel& model, const Eigen::VectorXd& x) { return model.score(x); }

// ---------------------------------------------------------------------------
// QDA

QdaModel::QdaModel(Eigen::VectorXd mu0, Eigen::VectorXd mu1, Eigen::MatrixXd sigma0,
                   Eigen::MatrixXd sigma1, double pi_inf)
    : mu0_(std::move(mu0)),
      mu1_(std::move(mu1)),
      sigma0_(std::move(sigma0)),
      sigma1_(std::move(sigma1)),
      pi_inf_(pi_inf) {
  check_prior(pi_inf_);
  if (mu0_.size() != mu1_.size() || sigma0_.rows() != mu0_.size() ||
      sigma1_.rows() != mu0_.size()) {
    throw InputError("QDA parameter dimensions disagree");
  }
  chol0_ = factor_spd(sigma0_, "class-0 covariance");
  chol1_ = factor_spd(sigma1_, "class-1 covariance");
  half_log_det0_ = chol0_.matrixLLT().diagonal().array().log().sum();
  half_log_det1_ = chol1_.matrixLLT().diagonal().array().log().sum();
}

double QdaModel::log_odds(const Eigen::VectorXd& x) const {
  check_dim(dim(), x);
  const Eigen::VectorXd z0 = chol0_.matrixL().solve(x - mu0_);
  const Eigen::VectorXd z1 = chol1_.matrixL().solve(x - mu1_);
  const double log_f1 = -half_log_det1_ - 0.5 * z1.squaredNorm();
  const double log_f0 = -half_log_det0_ - 0.5 * z0.squaredNorm();
  return log_prior_odds(pi_inf_) + log_f1 - log_f0;
}

double QdaModel::score(const Eigen::VectorXd& x) const { return logistic(log_odds(x)); }

QdaModel fit_qda(std::span<const LabeledSample> train, double pi_inf, FitOptions options) {
  const ClassStats s = class_means(train);
  Eigen::MatrixXd cov[2];
  for (int c = 0; c < 2; ++c) {
    if (s.n[c] < 2) {
      throw InputError("QDA needs at least two samples in class " + std::to_string(c));
    }
    cov[c] = scatter(train, s, c) / static_cast<double>(s.n[c] - 1);
    cov[c].diagonal().array() += options.ridge;
  }
  return QdaModel(s.mean[0], s.mean[1], std::move(cov[0]), std::move(cov[1]), pi_inf);
}

double qda_score(const QdaModel& model, const Eigen::VectorXd& x) { return model.score(x); }

// ---------------------------------------------------------------------------
// Kernel density classifier

KdeClassifier::KdeClassifier(Eigen::MatrixXd class0_points, Eigen::MatrixXd class1_points,
                             Eigen::VectorXd bandwidth0, Eigen::VectorXd bandwidth1,
                             double pi_inf)
    : points0_(std::move(class0_points)),
      points1_(std::move(class1_points)),
      bw0_(std::move(bandwidth0)),
      bw1_(std::move(bandwidth1)),
      pi_inf_(pi_inf) {
  check_prior(pi_inf_);
  if (points0_.cols() == 0 || points1_.cols() == 0) {
    throw InputError("kernel density classifier needs at least one point per class");
  }
  const auto d = points0_.rows();
  if (points1_.rows() != d || bw0_.size() != d || bw1_.size() != d) {
    throw InputError("kernel density classifier dimensions disagree");
  }
  if (!(bw0_.array() > 0.0).all() || !(bw1_.array() > 0.0).all()) {
    throw InputError("kernel bandwidths must be positive");
  }
}

double KdeClassifier::log_density(int c, const Eigen::VectorXd& x) const {
  check_dim(dim(), x);
  const Eigen::MatrixXd& pts = points(c);
  const Eigen::VectorXd& h = bandwidth(c);
  const Eigen::ArrayXd inv_h = h.array().inverse();
  double acc = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < pts.cols(); ++i) {
    const double q = ((x - pts.col(i)).array() * inv_h).square().sum();
    acc = log_add_exp(acc, -0.5 * q);
  }
  const double d = static_cast<double>(dim());
  return acc - std::log(static_cast<double>(pts.cols())) - h.array().log().sum() -
         0.5 * d * std::log(2.0 * std::numbers::pi);
}

KdeScore KdeClassifier::score_checked(const Eigen::VectorXd& x) const {
  const double l1 = log_density(1, x);
  const double l0 = log_density(0, x);
  if (l1 == -INFINITY && l0 == -INFINITY) return {pi_inf_, true};
  return {logistic(log_prior_odds(pi_inf_) + l1 - l0), false};
}

KdeClassifier fit_kde_classifier(std::span<const LabeledSample> train, double pi_inf,
                                 BandwidthRule rule) {
  const ClassStats s = class_means(train);
  Eigen::MatrixXd pts[2] = {Eigen::MatrixXd(s.d, static_cast<Eigen::Index>(s.n[0])),
                            Eigen::MatrixXd(s.d, static_cast<Eigen::Index>(s.n[1]))};
  Eigen::Index fill[2] = {0, 0};
  for (const auto& sample : train) pts[sample.y].col(fill[sample.y]++) = sample.x;

  Eigen::VectorXd bw[2];
  for (int c = 0; c < 2; ++c) {
    if (rule.kind == BandwidthRule::Kind::Fixed) {
      if (!(rule.value > 0.0)) throw InputError("fixed bandwidth must be positive");
      bw[c] = Eigen::VectorXd::Constant(s.d, rule.value);
      continue;
    }
    const double n = static_cast<double>(s.n[c]);
    if (s.n[c] < 2) {
      throw InputError("Silverman bandwidth needs at least two points in class " +
                       std::to_string(c));
    }
    const Eigen::ArrayXd var =
        (pts[c].colwise() - s.mean[c]).array().square().rowwise().sum() / (n - 1.0);
    if (!(var > 0.0).all()) {
      throw InputError("Silverman bandwidth undefined: zero spread in class " + std::to_string(c));
    }
    const double d = static_cast<double>(s.d);
    const double factor = std::pow(4.0 / ((d + 2.0) * n), 1.0 / (d + 4.0));
    bw[c] = var.sqrt().matrix() * factor;
  }
  return KdeClassifier(std::move(pts[0]), std::move(pts[1]), std::move(bw[0]), std::move(bw[1]),
                       pi_inf);
}

double kde_score(const KdeClassifier& model, const Eigen::VectorXd& x) { return model.score(x); }

// ---------------------------------------------------------------------------

int binarize(double score, double threshold) { return score >= threshold ? 1 : 0; }

double label_frequency(std::span<const LabeledSample> train) {
  if (train.empty()) throw InputError("training set is empty");
  std::size_t ones = 0;
  for (const auto& s : train) ones += s.y == 1 ? 1 : 0;
  return static_cast<double>(ones) / static_cast<double>(train.size());
}

double classifier_score(const Classifier& model, const Eigen::VectorXd& x) {
  return std::visit([&](const auto& m) { return m.score(x); }, model);
}

Eigen::Index classifier_dim(const Classifier& model) {
  return std::visit([](const auto& m) { return m.dim(); }, model);
}

}  // namespace labelshift
