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
#include <random>

namespace labelshift {

// SplitMix64 finalizer. Used only to turn (seed, stream) pairs into
// well-mixed engine seeds.
std::uint64_t splitmix64(std::uint64_t x);

// Seed for stream `stream` of a run seeded with `seed`. Distinct streams of
// the same run are statistically independent for all practical purposes.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Reproducible random source: a std::mt19937_64 engine (whose output
// sequence is fixed by the C++ standard) with hand-written uniform and
// normal transforms, so a seed yields bit-identical draws on every
// platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via the Marsaglia polar method.
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace labelshift
