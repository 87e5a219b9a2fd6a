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

#include <cmath>
#include <cstdint>

namespace labelshift {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Mean and standard error of a sample accumulated with compensated sums of
// x and x^2.
class SampleMoments {
 public:
  void add(double x) {
    ++n_;
    sum_.add(x);
    sum_sq_.add(x * x);
  }
  std::uint64_t count() const { return n_; }
  double mean() const { return n_ == 0 ? NAN : sum_.value() / static_cast<double>(n_); }
  // Unbiased sample variance; NaN for fewer than two points.
  double variance() const;
  double standard_error() const {
    return n_ < 2 ? NAN : std::sqrt(variance() / static_cast<double>(n_));
  }

 private:
  std::uint64_t n_ = 0;
  CompensatedSum sum_;
  CompensatedSum sum_sq_;
};

// log(exp(a) + exp(b)) without overflow; handles -inf operands.
inline double log_add_exp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

// Logistic function evaluated without overflow for large |z|.
inline double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace labelshift
