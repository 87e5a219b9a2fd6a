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
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace labelshift::cli {

// One data row of a detection CSV.
struct CsvRow {
  std::uint64_t number = 0;  // 1-based, header excluded
  std::optional<double> score;
  Eigen::VectorXd x;  // x1..xd when present
  std::optional<int> y;
};

// Streaming reader for the CSV contract: comma-separated, header required,
// a `score` column and/or feature columns x1..xd, optional label `y`.
// Errors name the data row: "row N: ...".
class CsvReader {
 public:
  // Reads the header; throws InputError when it names neither a score nor
  // features. Empty input is accepted and yields no rows.
  explicit CsvReader(std::istream& in);

  bool has_score() const { return score_col_ >= 0; }
  Eigen::Index feature_dim() const { return static_cast<Eigen::Index>(x_cols_.size()); }
  bool has_label() const { return y_col_ >= 0; }
  // False at end of input (including an empty file).
  bool next(CsvRow& row);

 private:
  std::istream& in_;
  std::size_t n_fields_ = 0;
  int score_col_ = -1;
  int y_col_ = -1;
  std::vector<int> x_cols_;
  std::uint64_t rows_ = 0;
  bool header_seen_ = false;
};

// Reads a whole labeled training CSV (x1..xd and y).
struct TrainingData {
  std::vector<Eigen::VectorXd> x;
  std::vector<int> y;
};
TrainingData read_training_csv(const std::string& path);

}  // namespace labelshift::cli
