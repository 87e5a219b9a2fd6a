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

#include "model_io.hpp"

#include <fstream>

#include "json_include.hpp"
#include "labelshift/errors.hpp"

namespace labelshift::cli {

namespace {

using nlohmann::json;

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); }

// Rows of `m` as arrays; `by_column` stores one column per inner array.
json matrix_json(const Eigen::MatrixXd& m, bool by_column = false) {
  json out = json::array();
  const Eigen::Index outer = by_column ? m.cols() : m.rows();
  for (Eigen::Index i = 0; i < outer; ++i) {
    const Eigen::VectorXd line = by_column ? Eigen::VectorXd(m.col(i)) : Eigen::VectorXd(m.row(i).transpose());
    out.push_back(vector_json(line));
  }
  return out;
}

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("model file: missing field '") + key + "'");
  return j.at(key);
}

Eigen::VectorXd read_vector(const json& j, const char* key) {
  const auto values = field(j, key).get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Eigen::MatrixXd read_matrix(const json& j, const char* key, bool by_column = false) {
  const auto rows = field(j, key).get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw InputError(std::string("model file: '") + key + "' is empty");
  const auto inner = static_cast<Eigen::Index>(rows.front().size());
  const auto outer = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m = by_column ? Eigen::MatrixXd(inner, outer) : Eigen::MatrixXd(outer, inner);
  for (Eigen::Index i = 0; i < outer; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != inner) {
      throw InputError(std::string("model file: ragged array in '") + key + "'");
    }
    for (Eigen::Index k = 0; k < inner; ++k) {
      (by_column ? m(k, i) : m(i, k)) = rows[i][k];
    }
  }
  return m;
}

}  // namespace

Classifier load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
    const std::string type = field(j, "type").get<std::string>();
    const double pi_inf = field(j, "pi_inf").get<double>();
    if (type == "lda") {
      return LdaModel(read_vector(j, "mu0"), read_vector(j, "mu1"), read_matrix(j, "sigma"), pi_inf);
    }
    if (type == "qda") {
      return QdaModel(read_vector(j, "mu0"), read_vector(j, "mu1"), read_matrix(j, "sigma0"),
                      read_matrix(j, "sigma1"), pi_inf);
    }
    if (type == "kde") {
      return KdeClassifier(read_matrix(j, "points0", true), read_matrix(j, "points1", true),
                           read_vector(j, "bandwidth0"), read_vector(j, "bandwidth1"), pi_inf);
    }
    throw InputError("model file: unknown type '" + type + "' (expected lda, qda or kde)");
  } catch (const json::exception& e) {
    throw InputError("model file '" + path + "': " + e.what());
  }
}

void save_model(const Classifier& model, const std::string& path) {
  nlohmann::ordered_json j;
  if (const auto* lda = std::get_if<LdaModel>(&model)) {
    j["type"] = "lda";
    j["pi_inf"] = lda->pi_inf();
    j["mu0"] = vector_json(lda->mu0());
    j["mu1"] = vector_json(lda->mu1());
    j["sigma"] = matrix_json(lda->sigma());
  } else if (const auto* qda = std::get_if<QdaModel>(&model)) {
    j["type"] = "qda";
    j["pi_inf"] = qda->pi_inf();
    j["mu0"] = vector_json(qda->mu0());
    j["mu1"] = vector_json(qda->mu1());
    j["sigma0"] = matrix_json(qda->sigma0());
    j["sigma1"] = matrix_json(qda->sigma1());
  } else {
    const auto& kde = std::get<KdeClassifier>(model);
    j["type"] = "kde";
    j["pi_inf"] = kde.pi_inf();
    j["points0"] = matrix_json(kde.points(0), true);
    j["points1"] = matrix_json(kde.points(1), true);
    j["bandwidth0"] = vector_json(kde.bandwidth(0));
    j["bandwidth1"] = vector_json(kde.bandwidth(1));
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write model file '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace labelshift::cli
