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
#include <span>
#include <variant>
#include <vector>

namespace labelshift {

struct LabeledSample {
  Eigen::VectorXd x;
  int y = 0;
};

struct FitOptions {
  // Added to the diagonal of every estimated covariance. Zero disables it.
  double ridge = 0.0;
};

// Two-Gaussian classifier with a shared (pooled) covariance. The score is the
// posterior P(Y=1 | x) under prior pi_inf, computed from the log-odds
//   log(pi/(1-pi)) + b'x + c,   b = Sigma^-1 (mu1 - mu0)
// and a stable logistic transform.
class LdaModel {
 public:
  LdaModel(Eigen::VectorXd mu0, Eigen::VectorXd mu1, Eigen::MatrixXd sigma, double pi_inf);

  double score(const Eigen::VectorXd& x) const;
  double log_odds(const Eigen::VectorXd& x) const;

  // Same model with a different prior plugged into the posterior.
  LdaModel with_prior(double pi) const;

  const Eigen::VectorXd& mu0() const { return mu0_; }
  const Eigen::VectorXd& mu1() const { return mu1_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  // Discriminant direction Sigma^-1 (mu1 - mu0).
  const Eigen::VectorXd& direction() const { return direction_; }
  double pi_inf() const { return pi_inf_; }
  Eigen::Index dim() const { return mu0_.size(); }

 private:
  Eigen::VectorXd mu0_, mu1_;
  Eigen::MatrixXd sigma_;
  double pi_inf_;
  Eigen::VectorXd direction_;
  double offset_ = 0.0;  // log-odds at x = 0 including the prior term
};

// Two-Gaussian classifier with per-class covariances.
class QdaModel {
 public:
  QdaModel(Eigen::VectorXd mu0, Eigen::VectorXd mu1, Eigen::MatrixXd sigma0,
           Eigen::MatrixXd sigma1, double pi_inf);

  double score(const Eigen::VectorXd& x) const;
  double log_odds(const Eigen::VectorXd& x) const;

  const Eigen::VectorXd& mu0() const { return mu0_; }
  const Eigen::VectorXd& mu1() const { return mu1_; }
  const Eigen::MatrixXd& sigma0() const { return sigma0_; }
  const Eigen::MatrixXd& sigma1() const { return sigma1_; }
  double pi_inf() const { return pi_inf_; }
  Eigen::Index dim() const { return mu0_.size(); }

 private:
  Eigen::VectorXd mu0_, mu1_;
  Eigen::MatrixXd sigma0_, sigma1_;
  double pi_inf_;
  Eigen::LLT<Eigen::MatrixXd> chol0_, chol1_;
  double half_log_det0_ = 0.0, half_log_det1_ = 0.0;
};

struct BandwidthRule {
  enum class Kind { Silverman, Fixed };
  Kind kind = Kind::Silverman;
  double value = 0.0;  // bandwidth for Kind::Fixed

  static BandwidthRule silverman() { return {Kind::Silverman, 0.0}; }
  static BandwidthRule fixed(double h) { return {Kind::Fixed, h}; }
};

struct KdeScore {
  double score = 0.0;
  // Both class densities underflowed; score fell back to the prior.
  bool prior_fallback = false;
};

// Classifier built from per-class product-Gaussian kernel density estimates.
class KdeClassifier {
 public:
  KdeClassifier(Eigen::MatrixXd class0_points, Eigen::MatrixXd class1_points,
                Eigen::VectorXd bandwidth0, Eigen::VectorXd bandwidth1, double pi_inf);

  double score(const Eigen::VectorXd& x) const { return score_checked(x).score; }
  KdeScore score_checked(const Eigen::VectorXd& x) const;

  // log of the class-c density estimate at x.
  double log_density(int c, const Eigen::VectorXd& x) const;

  // Points are stored one per column.
  const Eigen::MatrixXd& points(int c) const { return c == 0 ? points0_ : points1_; }
  const Eigen::VectorXd& bandwidth(int c) const { return c == 0 ? bw0_ : bw1_; }
  double pi_inf() const { return pi_inf_; }
  Eigen::Index dim() const { return points0_.rows(); }

 private:
  Eigen::MatrixXd points0_, points1_;
  Eigen::VectorXd bw0_, bw1_;
  double pi_inf_;
};

LdaModel fit_lda(std::span<const LabeledSample> train, double pi_inf, FitOptions options = {});
QdaModel fit_qda(std::span<const LabeledSample> train, double pi_inf, FitOptions options = {});
KdeClassifier fit_kde_classifier(std::span<const LabeledSample> train, double pi_inf,
                                 BandwidthRule rule = BandwidthRule::silverman());

double lda_score(const LdaModel& model, const Eigen::VectorXd& x);
double qda_score(const QdaModel& model, const Eigen::VectorXd& x);
double kde_score(const KdeClassifier& model, const Eigen::VectorXd& x);

// 1 if score >= threshold, else 0.
int binarize(double score, double threshold);

// Fraction of class-1 labels. Only used when the caller asks for pi_inf to be
// estimated rather than supplied.
double label_frequency(std::span<const LabeledSample> train);

using Classifier = std::variant<LdaModel, QdaModel, KdeClassifier>;

double classifier_score(const Classifier& model, const Eigen::VectorXd& x);
Eigen::Index classifier_dim(const Classifier& model);

}  // namespace labelshift
