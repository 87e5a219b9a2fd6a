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
#include <utility>
#include <vector>

namespace labelshift::cli {

// Flat `key = value` file. Blank lines and lines starting with '#' are
// skipped; keys keep their order of appearance.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

// `pi0_min` -> `--pi0-min`
std::string config_key_to_flag(const std::string& key);

}  // namespace labelshift::cli
