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
#include <vector>

#include "labelshift/oc.hpp"

namespace labelshift {

struct ReportEntry {
  std::string name;
  OperatingCharacteristics oc;
};

// Rows sorted by ADD (ascending, stable). Flags are advisory.
struct ComparisonReport {
  std::string title;
  std::vector<ReportEntry> rows;
  // Largest ARL exceeds the smallest by more than 5%.
  bool arl_mismatch = false;
  // Some row rests on fewer than 30 replications.
  bool unreliable_se = false;

  std::string to_text() const;
  // One JSON object per row: {name, arl, arl_se, add, add_se, n, censored}.
  std::string to_json_lines() const;
};

// Throws InputError on an empty list.
ComparisonReport relative_comparison_report(std::vector<ReportEntry> entries,
                                            std::string title = {});

}  // namespace labelshift
