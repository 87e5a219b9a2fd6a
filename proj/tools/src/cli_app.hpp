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

#include <ostream>
#include <string>
#include <vector>

namespace labelshift::cli {

inline constexpr int kExitAlarm = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNoAlarm = 2;

// Runs the tool on argv-style arguments (args[0] is the program name) and
// returns the process exit code. Commands other than `detect` return 0 on
// success.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace labelshift::cli
