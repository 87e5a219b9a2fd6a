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

#include <string>

#include "labelshift/classifiers.hpp"

namespace labelshift::cli {

// JSON model files:
//   {"type":"lda","pi_inf":p,"mu0":[..],"mu1":[..],"sigma":[[..],..]}
//   {"type":"qda","pi_inf":p,"mu0":[..],"mu1":[..],"sigma0":[[..]],"sigma1":[[..]]}
//   {"type":"kde","pi_inf":p,"points0":[[..],..],"points1":[[..],..],
//    "bandwidth0":[..],"bandwidth1":[..]}
// Points are stored one observation per inner array.
Classifier load_model(const std::string& path);
void save_model(const Classifier& model, const std::string& path);

}  // namespace labelshift::cli
