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

#include "labelshift/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#ifdef LABELSHIFT_VENDORED_JSON
#include <json.hpp>
#else
#include <nlohmann/json.hpp>
#endif

#include "labelshift/errors.hpp"

namespace labelshift {

namespace {

constexpr double kArlMismatch = 0.05;
constexpr std::uint64_t kReliableReps = 30;

std::string estimate_cell(const RunLengthSummary& s) {
  if (s.empty()) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f (%.2f)", s.mean, s.se);
  return buf;
}

std::uint64_t row_n(const OperatingCharacteristics& oc) {
  return oc.add.empty() ? oc.arl.n : oc.add.n;
}

nlohmann::json number_or_null(const RunLengthSummary& s, double value) {
  return s.empty() ? nlohmann::json(nullptr) : nlohmann::json(value);
}

}  // namespace

ComparisonReport relative_comparison_report(std::vector<ReportEntry> entries, std::string title) {
  if (entries.empty()) throw InputError("comparison report needs at least one entry");
  std::stable_sort(entries.begin(), entries.end(), [](const ReportEntry& a, const ReportEntry& b) {
    const double da = a.oc.add.empty() ? INFINITY : a.oc.add.mean;
    const double db = b.oc.add.empty() ? INFINITY : b.oc.add.mean;
    return da < db;
  });
  ComparisonReport report;
  report.title = std::move(title);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& e : entries) {
    if (!e.oc.arl.empty()) {
      lo = std::min(lo, e.oc.arl.mean);
      hi = std::max(hi, e.oc.arl.mean);
    }
    if ((!e.oc.arl.empty() && e.oc.arl.n < kReliableReps) ||
        (!e.oc.add.empty() && e.oc.add.n < kReliableReps)) {
      report.unreliable_se = true;
    }
  }
  report.arl_mismatch = lo < hi && hi > lo * (1.0 + kArlMismatch);
  report.rows = std::move(entries);
  return report;
}

std::string ComparisonReport::to_text() const {
  const std::vector<std::string> header{"procedure", "threshold", "ARL (SE)", "ADD (SE)", "n",
                                        "censored"};
  std::vector<std::vector<std::string>> cells{header};
  for (const auto& r : rows) {
    char thr[32];
    std::snprintf(thr, sizeof thr, "%.4g", r.oc.threshold);
    cells.push_back({r.name, thr, estimate_cell(r.oc.arl), estimate_cell(r.oc.add),
                     std::to_string(row_n(r.oc)),
                     std::to_string(r.oc.arl.n_censored + r.oc.add.n_censored)});
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  if (!title.empty()) out << title << '\n';
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t c = 0; c < cells[i].size(); ++c) {
      const auto& v = cells[i][c];
      const std::string pad(width[c] - v.size(), ' ');
      if (c > 0) out << "  ";
      out << (c == 0 ? v + pad : pad + v);
    }
    out << '\n';
    if (i == 0) {
      std::size_t total = 2 * (width.size() - 1);
      for (auto w : width) total += w;
      out << std::string(total, '-') << '\n';
    }
  }
  if (arl_mismatch) out << "warning: ARLs differ by more than 5%; delays are not comparable\n";
  if (unreliable_se) out << "warning: fewer than 30 replications; standard errors are unreliable\n";
  return out.str();
}

std::string ComparisonReport::to_json_lines() const {
  std::string out;
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["name"] = r.name;
    row["arl"] = number_or_null(r.oc.arl, r.oc.arl.mean);
    row["arl_se"] = number_or_null(r.oc.arl, r.oc.arl.se);
    row["add"] = number_or_null(r.oc.add, r.oc.add.mean);
    row["add_se"] = number_or_null(r.oc.add, r.oc.add.se);
    row["n"] = row_n(r.oc);
    row["censored"] = r.oc.arl.n_censored + r.oc.add.n_censored;
    out += row.dump();
    out += '\n';
  }
  return out;
}

}  // namespace labelshift
