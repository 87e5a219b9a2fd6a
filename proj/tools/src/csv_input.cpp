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

#include "csv_input.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>

#include "labelshift/errors.hpp"

namespace labelshift::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

bool blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

CsvReader::CsvReader(std::istream& in) : in_(in) {
  std::string line;
  while (std::getline(in_, line) && blank(line)) {
  }
  if (blank(line)) return;  // empty input: no header, no rows
  {
    std::string_view head = line;
    if (head.size() >= 3 && head.substr(0, 3) == "\xEF\xBB\xBF") head.remove_prefix(3);
    const auto names = split(head);
    n_fields_ = names.size();
    std::vector<int> by_index;
    for (std::size_t c = 0; c < names.size(); ++c) {
      const std::string_view name = names[c];
      if (name == "score") {
        score_col_ = static_cast<int>(c);
      } else if (name == "y") {
        y_col_ = static_cast<int>(c);
      } else if (name.size() > 1 && name[0] == 'x') {
        int index = 0;
        const auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
        if (ec == std::errc() && p == name.data() + name.size() && index >= 1) {
          if (static_cast<std::size_t>(index) > by_index.size()) by_index.resize(index, -1);
          if (by_index[index - 1] >= 0) {
            throw InputError("header: duplicate column '" + std::string(name) + "'");
          }
          by_index[index - 1] = static_cast<int>(c);
        }
      }
    }
    for (std::size_t j = 0; j < by_index.size(); ++j) {
      if (by_index[j] < 0) {
        throw InputError("header: feature columns must be x1..xd; x" + std::to_string(j + 1) +
                         " is missing");
      }
    }
    x_cols_ = std::move(by_index);
    if (score_col_ < 0 && x_cols_.empty()) {
      throw InputError("header: need a 'score' column or feature columns x1..xd");
    }
    header_seen_ = true;
  }
}

bool CsvReader::next(CsvRow& row) {
  if (!header_seen_) return false;
  std::string line;
  while (std::getline(in_, line)) {
    if (blank(line)) continue;
    row.number = ++rows_;
    const std::string prefix = "row " + std::to_string(row.number) + ": ";
    const auto fields = split(line);
    if (fields.size() != n_fields_) {
      throw InputError(prefix + "expected " + std::to_string(n_fields_) + " fields, found " +
                       std::to_string(fields.size()));
    }
    auto number = [&](int col, const char* what) {
      const std::string_view f = fields[col];
      double v = 0.0;
      const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || p != f.data() + f.size() || !std::isfinite(v)) {
        throw InputError(prefix + "malformed " + what + " '" + std::string(f) + "'");
      }
      return v;
    };
    row.score.reset();
    if (score_col_ >= 0) {
      const double s = number(score_col_, "score");
      if (!(s >= 0.0 && s <= 1.0)) throw InputError(prefix + "score out of range");
      row.score = s;
    }
    row.x.resize(feature_dim());
    for (std::size_t j = 0; j < x_cols_.size(); ++j) {
      row.x[static_cast<Eigen::Index>(j)] = number(x_cols_[j], "feature value");
    }
    row.y.reset();
    if (y_col_ >= 0) {
      const double y = number(y_col_, "label");
      if (y != 0.0 && y != 1.0) throw InputError(prefix + "label must be 0 or 1");
      row.y = static_cast<int>(y);
    }
    return true;
  }
  return false;
}

TrainingData read_training_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open training file '" + path + "'");
  CsvReader reader(in);
  TrainingData data;
  CsvRow row;
  while (reader.next(row)) {
    if (reader.feature_dim() == 0 || !reader.has_label()) {
      throw InputError("training file needs feature columns x1..xd and a label column y");
    }
    data.x.push_back(row.x);
    data.y.push_back(*row.y);
  }
  if (data.x.empty()) throw InputError("training file '" + path + "' has no rows");
  return data;
}

}  // namespace labelshift::cli
