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

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "tahqiq/features.hpp"

namespace tahqiq::models {

enum class ModelKind { nb, sgd, svm, rf, gbt };

std::string to_string(ModelKind kind);
ModelKind kind_from_string(const std::string& name);

using ParamValue = std::variant<bool, double, std::string>;
using ParamMap = std::map<std::string, ParamValue>;

// Hyperparameters; keys left unset fall back to the kind's defaults.
struct ModelSpec {
  ModelKind kind = ModelKind::nb;
  ParamMap params;
  std::uint64_t seed = 0;
};

ParamMap default_params(ModelKind kind);
// Throws DataError on unknown keys, ill-typed or out-of-range values.
void validate_spec(const ModelSpec& spec);
std::string spec_json(const ModelSpec& spec);
ModelSpec spec_from_json(const std::string& text);

struct ClassWeights {
  double w0 = 1.0;
  double w1 = 1.0;
};

// w_c = N / (2 * N_c). Throws DataError unless both classes are present.
ClassWeights balanced_weights(const std::vector<int>& labels);

struct FeatureMatrix {
  std::vector<features::SparseVector> rows;
  std::vector<int> labels;
  std::size_t dim = 0;

  std::size_t size() const { return rows.size(); }
  void validate() const;

  static FeatureMatrix from_dense(const std::vector<std::vector<double>>& dense,
                                  std::vector<int> labels);
  static FeatureMatrix from_records(const std::vector<features::VectorRecord>& records);
};

// Scores live in the model's own space: posterior/probability in [0,1] for
// nb, sgd, rf, gbt and calibrated svm; unbounded decision values for
// uncalibrated svm (default_threshold 0 there, 0.5 elsewhere).
class Model {
 public:
  virtual ~Model() = default;
  virtual ModelKind kind() const = 0;
  virtual std::size_t dim() const = 0;
  virtual double score(const features::SparseVector& x) const = 0;
  virtual double default_threshold() const { return 0.5; }
  virtual std::string params_json() const = 0;
  const ModelSpec& spec() const { return spec_; }

 protected:
  explicit Model(ModelSpec spec) : spec_(std::move(spec)) {}
  ModelSpec spec_;
};

std::unique_ptr<Model> train(const FeatureMatrix& X, const ModelSpec& spec);

double predict_score(const Model& model, const features::SparseVector& x);
std::vector<double> predict_scores(const Model& model, const FeatureMatrix& X);
int predict_label(const Model& model, const features::SparseVector& x,
                  double threshold);
int predict_label(const Model& model, const features::SparseVector& x);

void save_model(const std::string& path, const Model& model);
std::unique_ptr<Model> load_model(const std::string& path);

// Greedy split search shared by the tree learners, exposed so exhaustive
// enumeration can verify the chosen splits. `columns` is column-major over
// all rows; `rows` lists the node's members (bootstrap duplicates repeat).
// Ties break to the lowest feature id, then the lowest threshold.
struct SplitCandidate {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

// Information gain under weighted entropy; candidate thresholds are
// midpoints of consecutive distinct values.
SplitCandidate best_entropy_split(const std::vector<std::vector<double>>& columns,
                                  const std::vector<int>& labels,
                                  const std::vector<double>& weights,
                                  const std::vector<std::size_t>& rows,
                                  const std::vector<std::size_t>& features);

// Second-order gain 0.5*[GL^2/(HL+lambda) + GR^2/(HR+lambda) - G^2/(H+lambda)]
// - gamma; children whose hessian sum falls below min_child_weight are not
// eligible.
SplitCandidate best_gain_split(const std::vector<std::vector<double>>& columns,
                               const std::vector<double>& grad,
                               const std::vector<double>& hess,
                               const std::vector<std::size_t>& rows,
                               const std::vector<std::size_t>& features,
                               double lambda, double gamma,
                               double min_child_weight);

}  // namespace tahqiq::models
