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

#include "labelshift/stats.hpp"

#include <algorithm>

namespace labelshift {

double SampleMoments::variance() const {
  if (n_ < 2) return NAN;
  const double n = static_cast<double>(n_);
  const double m = sum_.value() / n;
  const double ss = sum_sq_.value() - n * m * m;
  return std::max(0.0, ss / (n - 1.0));
}

}  // namespace labelshift
