// Copyright 2026 The Tahqiq Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "models_impl.hpp"
#include "tahqiq/errors.hpp"

namespace tahqiq::models::detail {

using nlohmann::json;

namespace {

std::vector<Tree> trees_from_json(const json& arr, bool allow_empty) {
  if (!arr.is_array()) throw DataError("malformed model file: trees");
  std::vector<Tree> trees;
  for (const auto& t : arr) trees.push_back(Tree::from_json(t));
  if (trees.empty() && !allow_empty)
    throw DataError("malformed model file: no trees");
  return trees;
}

features::SparseVector sparse_from_json(const json& arr, std::size_t dim) {
  features::SparseVector v;
  v.dim = dim;
  for (const auto& pair : arr) {
    if (!pair.is_array() || pair.size() != 2)
      throw DataError("malformed model file: support vector entry");
    v.entries.push_back({pair[0].get<std::uint32_t>(), pair[1].get<double>()});
  }
  return v;
}

}  // namespace

std::unique_ptr<Model> model_from_json(const json& j) {
  ModelSpec spec;
  spec.kind = kind_from_string(j.at("kind").get<std::string>());
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.params = params_from_json(j.at("spec"));
  validate_spec(spec);
  std::size_t dim = j.at("dim").get<std::size_t>();
  const json& p = j.at("params");

  switch (spec.kind) {
    case ModelKind::nb: {
      auto m = std::make_unique<NbModel>(spec, dim);
      m->log_prior = p.at("log_prior").get<std::array<double, 2>>();
      m->log_prob0 = p.at("log_prob0").get<std::vector<double>>();
      m->log_prob1 = p.at("log_prob1").get<std::vector<double>>();
      m->minmax = p.at("minmax").get<bool>();
      if (m->minmax) {
        m->feat_min = p.at("feat_min").get<std::vector<double>>();
        m->feat_range = p.at("feat_range").get<std::vector<double>>();
        if (m->feat_min.size() != dim || m->feat_range.size() != dim)
          throw DataError("malformed model file: minmax tables");
      }
      if (m->log_prob0.size() != dim || m->log_prob1.size() != dim)
        throw DataError("malformed model file: likelihood tables");
      return m;
    }
    case ModelKind::sgd: {
      auto m = std::make_unique<SgdModel>(spec, dim);
      m->weights = p.at("weights").get<std::vector<double>>();
      m->bias = p.at("bias").get<double>();
      m->epochs_run = p.value("epochs_run", 0ULL);
      if (m->weights.size() != dim)
        throw DataError("malformed model file: weight vector");
      return m;
    }
    case ModelKind::svm: {
      auto m = std::make_unique<SvmModel>(spec, dim);
      m->rbf = p.at("kernel").get<std::string>() == "rbf";
      m->gamma = p.at("gamma").get<double>();
      m->b = p.at("b").get<double>();
      m->coefficients = p.at("coefficients").get<std::vector<double>>();
      m->sv_indices = p.at("sv_indices").get<std::vector<std::size_t>>();
      for (const auto& sv : p.at("support_vectors"))
        m->support_vectors.push_back(sparse_from_json(sv, dim));
      if (m->support_vectors.size() != m->coefficients.size())
        throw DataError("malformed model file: support vectors");
      m->calibrated = p.at("calibrated").get<bool>();
      if (m->calibrated) {
        m->platt_a = p.at("platt_a").get<double>();
        m->platt_b = p.at("platt_b").get<double>();
      }
      return m;
    }
    case ModelKind::rf: {
      auto m = std::make_unique<ForestModel>(spec, dim);
      m->trees = trees_from_json(p.at("trees"), false);
      return m;
    }
    case ModelKind::gbt: {
      auto m = std::make_unique<GbtModel>(spec, dim);
      m->base_score = p.at("base_score").get<double>();
      m->trees = trees_from_json(p.at("trees"), true);
      return m;
    }
  }
  throw DataError("unknown model kind");
}

}  // namespace tahqiq::models::detail
