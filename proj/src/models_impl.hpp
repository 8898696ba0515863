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

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "tahqiq/models.hpp"

namespace tahqiq::models::detail {

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

inline double sparse_dot(const features::SparseVector& x, const std::vector<double>& w) {
  double acc = 0.0;
  for (const auto& e : x.entries) acc += e.weight * w[e.col];
  return acc;
}

double get_num(const ParamMap& params, const std::string& key);
std::string get_str(const ParamMap& params, const std::string& key);
bool get_bool(const ParamMap& params, const std::string& key);

// Per-sample weights from the class_weight param ("balanced" or "none").
std::vector<double> sample_weights(const ParamMap& params, const std::vector<int>& labels);

// Column-major densification used by the tree learners.
std::vector<std::vector<double>> densify_columns(const FeatureMatrix& X);

nlohmann::json params_to_json(const ParamMap& params);
ParamMap params_from_json(const nlohmann::json& j);

struct TreeNode {
  bool is_leaf = true;
  std::size_t feature = 0;
  double threshold = 0.0;
  double value = 0.0;  // class-1 probability (forest) or leaf weight (boosting)
  std::int32_t left = -1;
  std::int32_t right = -1;
};

// Flat tree; node 0 is the root, children index into the same vector.
struct Tree {
  std::vector<TreeNode> nodes;
  double eval(const features::SparseVector& x) const;
  nlohmann::json to_json() const;
  static Tree from_json(const nlohmann::json& j);
};

class NbModel : public Model {
 public:
  NbModel(ModelSpec spec, std::size_t dim) : Model(std::move(spec)), dim_(dim) {}
  ModelKind kind() const override { return ModelKind::nb; }
  std::size_t dim() const override { return dim_; }
  double score(const features::SparseVector& x) const override;
  std::string params_json() const override;

  std::size_t dim_ = 0;
  std::array<double, 2> log_prior{0.0, 0.0};
  std::vector<double> log_prob0, log_prob1;  // per-feature log likelihoods
  bool minmax = false;
  std::vector<double> feat_min, feat_range;  // set when minmax

  features::SparseVector rescale(const features::SparseVector& x) const;
};

class SgdModel : public Model {
 public:
  SgdModel(ModelSpec spec, std::size_t dim) : Model(std::move(spec)), dim_(dim) {}
  ModelKind kind() const override { return ModelKind::sgd; }
  std::size_t dim() const override { return dim_; }
  double score(const features::SparseVector& x) const override;
  std::string params_json() const override;

  double decision(const features::SparseVector& x) const;

  std::size_t dim_ = 0;
  std::vector<double> weights;
  double bias = 0.0;
  std::size_t epochs_run = 0;
};

class SvmModel : public Model {
 public:
  SvmModel(ModelSpec spec, std::size_t dim) : Model(std::move(spec)), dim_(dim) {}
  ModelKind kind() const override { return ModelKind::svm; }
  std::size_t dim() const override { return dim_; }
  double score(const features::SparseVector& x) const override;
  double default_threshold() const override { return calibrated ? 0.5 : 0.0; }
  std::string params_json() const override;

  double decision(const features::SparseVector& x) const;

  std::size_t dim_ = 0;
  bool rbf = true;
  double gamma = 1.0;
  double b = 0.0;
  std::vector<features::SparseVector> support_vectors;
  std::vector<double> coefficients;  // alpha_i * y_i
  std::vector<std::size_t> sv_indices;
  bool calibrated = false;
  double platt_a = 0.0, platt_b = 0.0;
};

class ForestModel : public Model {
 public:
  ForestModel(ModelSpec spec, std::size_t dim) : Model(std::move(spec)), dim_(dim) {}
  ModelKind kind() const override { return ModelKind::rf; }
  std::size_t dim() const override { return dim_; }
  double score(const features::SparseVector& x) const override;
  std::string params_json() const override;

  std::size_t dim_ = 0;
  std::vector<Tree> trees;
};

class GbtModel : public Model {
 public:
  GbtModel(ModelSpec spec, std::size_t dim) : Model(std::move(spec)), dim_(dim) {}
  ModelKind kind() const override { return ModelKind::gbt; }
  std::size_t dim() const override { return dim_; }
  double score(const features::SparseVector& x) const override;
  std::string params_json() const override;

  double margin(const features::SparseVector& x) const;

  std::size_t dim_ = 0;
  double base_score = 0.0;  // margin-space offset
  std::vector<Tree> trees;
};

std::unique_ptr<Model> train_nb(const FeatureMatrix& X, const ModelSpec& spec);
std::unique_ptr<Model> train_sgd(const FeatureMatrix& X, const ModelSpec& spec);
std::unique_ptr<Model> train_svm(const FeatureMatrix& X, const ModelSpec& spec);
std::unique_ptr<Model> train_rf(const FeatureMatrix& X, const ModelSpec& spec);
std::unique_ptr<Model> train_gbt(const FeatureMatrix& X, const ModelSpec& spec);

std::unique_ptr<Model> model_from_json(const nlohmann::json& j);

}  // namespace tahqiq::models::detail
