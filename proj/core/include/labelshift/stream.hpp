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

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>

namespace labelshift {

// Which side of the change a replication is drawn from. Post means the
// change happened before the first observation (nu = 0).
enum class Regime { Pre, Post };

struct Observation {
  Eigen::VectorXd x;
  int y = 0;
};

// Endless source of observations for one replication. The returned reference
// stays valid until the next call.
class ObservationStream {
 public:
  virtual ~ObservationStream() = default;
  virtual const Observation& next() = 0;
};

// Builds the observation stream of one replication. Must be deterministic in
// (seed, regime) and safe to call concurrently.
using StreamSampler = std::function<std::unique_ptr<ObservationStream>(std::uint64_t, Regime)>;

}  // namespace labelshift
