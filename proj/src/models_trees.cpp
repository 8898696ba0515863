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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "models_impl.hpp"
#include "tahqiq/errors.hpp"
#include "tahqiq/rng.hpp"

namespace tahqiq::models::detail {

using nlohmann::json;

namespace {

std::size_t log2_feature_count(std::size_t dim) {
  std::size_t m = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(dim))));
  return std::clamp<std::size_t>(m, 1, dim);
}

std::vector<std::size_t> iota_rows(std::size_t n) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  return all;
}

void partition_rows(const std::vector<double>& column, double threshold,
                    const std::vector<std::size_t>& rows,
                    std::vector<std::size_t>& left, std::vector<std::size_t>& right) {
  left.clear();
  right.clear();
  for (std::size_t r : rows)
    (column[r] <= threshold ? left : right).push_back(r);
}

struct ForestGrower {
  const std::vector<std::vector<double>>& columns;
  const std::vector<int>& labels;
  const std::vector<double>& weights;
  std::size_t max_depth;
  std::size_t n_candidates;
  Rng* rng;
  Tree* tree;

  std::int32_t grow(const std::vector<std::size_t>& rows, std::size_t depth) {
    double w0 = 0.0, w1 = 0.0;
    for (std::size_t r : rows) (labels[r] == 1 ? w1 : w0) += weights[r];

    std::int32_t id = static_cast<std::int32_t>(tree->nodes.size());
    tree->nodes.emplace_back();
    tree->nodes[id].value = w0 + w1 > 0.0 ? w1 / (w0 + w1) : 0.5;
    if (depth >= max_depth || rows.size() < 2) return id;

    auto candidates = rng->sample_without_replacement(columns.size(), n_candidates);
    SplitCandidate split = best_entropy_split(columns, labels, weights, rows, candidates);
    if (!split.found) return id;

    std::vector<std::size_t> left_rows, right_rows;
    partition_rows(columns[split.feature], split.threshold, rows, left_rows, right_rows);
    tree->nodes[id].is_leaf = false;
    tree->nodes[id].feature = split.feature;
    tree->nodes[id].threshold = split.threshold;
    std::int32_t left = grow(left_rows, depth + 1);
    tree->nodes[id].left = left;
    std::int32_t right = grow(right_rows, depth + 1);
    tree->nodes[id].right = right;
    return id;
  }
};

struct BoostGrower {
  const std::vector<std::vector<double>>& columns;
  const std::vector<double>& grad;
  const std::vector<double>& hess;
  const std::vector<std::size_t>& feature_pool;
  std::size_t max_depth;
  double lambda, gamma, min_child_weight, learning_rate;
  Tree* tree;

  std::int32_t grow(const std::vector<std::size_t>& rows, std::size_t depth) {
    double g = 0.0, h = 0.0;
    for (std::size_t r : rows) {
      g += grad[r];
      h += hess[r];
    }
    std::int32_t id = static_cast<std::int32_t>(tree->nodes.size());
    tree->nodes.emplace_back();
    tree->nodes[id].value = -g / (h + lambda) * learning_rate;
    if (depth >= max_depth || rows.size() < 2) return id;

    SplitCandidate split = best_gain_split(columns, grad, hess, rows, feature_pool,
                                           lambda, gamma, min_child_weight);
    if (!split.found) return id;

    std::vector<std::size_t> left_rows, right_rows;
    partition_rows(columns[split.feature], split.threshold, rows, left_rows, right_rows);
    tree->nodes[id].is_leaf = false;
    tree->nodes[id].feature = split.feature;
    tree->nodes[id].threshold = split.threshold;
    std::int32_t left = grow(left_rows, depth + 1);
    tree->nodes[id].left = left;
    std::int32_t right = grow(right_rows, depth + 1);
    tree->nodes[id].right = right;
    return id;
  }
};

}  // namespace

double ForestModel::score(const features::SparseVector& x) const {
  double sum = 0.0;
  for (const Tree& t : trees) sum += t.eval(x);
  return sum / static_cast<double>(trees.size());
}

std::string ForestModel::params_json() const {
  json j;
  json trees_json = json::array();
  for (const Tree& t : trees) trees_json.push_back(t.to_json());
  j["trees"] = trees_json;
  return j.dump();
}

std::unique_ptr<Model> train_rf(const FeatureMatrix& X, const ModelSpec& spec) {
  std::size_t n_estimators = static_cast<std::size_t>(get_num(spec.params, "n_estimators"));
  std::size_t max_depth = static_cast<std::size_t>(get_num(spec.params, "max_depth"));
  std::vector<double> weights = sample_weights(spec.params, X.labels);
  auto columns = densify_columns(X);
  std::size_t n_candidates = log2_feature_count(X.dim);

  auto model = std::make_unique<ForestModel>(spec, X.dim);
  std::uint64_t base = splitmix64(spec.seed);
  for (std::size_t t = 0; t < n_estimators; ++t) {
    Rng rng(splitmix64(base + t));
    std::vector<std::size_t> bootstrap(X.size());
    for (auto& r : bootstrap) r = rng.index(X.size());
    std::sort(bootstrap.begin(), bootstrap.end());

    Tree tree;
    ForestGrower grower{columns, X.labels, weights, max_depth, n_candidates, &rng, &tree};
    grower.grow(bootstrap, 0);
    model->trees.push_back(std::move(tree));
  }
  return model;
}

double GbtModel::margin(const features::SparseVector& x) const {
  double m = base_score;
  for (const Tree& t : trees) m += t.eval(x);
  return m;
}

double GbtModel::score(const features::SparseVector& x) const {
  return sigmoid(margin(x));
}

std::string GbtModel::params_json() const {
  json j;
  j["base_score"] = base_score;
  json trees_json = json::array();
  for (const Tree& t : trees) trees_json.push_back(t.to_json());
  j["trees"] = trees_json;
  return j.dump();
}

std::unique_ptr<Model> train_gbt(const FeatureMatrix& X, const ModelSpec& spec) {
  std::size_t n_rounds = static_cast<std::size_t>(get_num(spec.params, "n_rounds"));
  std::size_t max_depth = static_cast<std::size_t>(get_num(spec.params, "max_depth"));
  double lambda = get_num(spec.params, "lambda");
  double gamma = get_num(spec.params, "gamma");
  double min_child_weight = get_num(spec.params, "min_child_weight");
  double learning_rate = get_num(spec.params, "learning_rate");
  double subsample = get_num(spec.params, "subsample");
  double colsample = get_num(spec.params, "colsample_bytree");
  std::vector<double> weights = sample_weights(spec.params, X.labels);
  auto columns = densify_columns(X);

  auto model = std::make_unique<GbtModel>(spec, X.dim);
  model->base_score = 0.0;

  std::vector<double> margin(X.size(), model->base_score);
  std::vector<double> grad(X.size()), hess(X.size());
  std::size_t n_rows = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(subsample * static_cast<double>(X.size()))));
  std::size_t n_cols = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(colsample * static_cast<double>(X.dim))));

  Rng rng(splitmix64(spec.seed));
  for (std::size_t round = 0; round < n_rounds; ++round) {
    for (std::size_t i = 0; i < X.size(); ++i) {
      double p = sigmoid(margin[i]);
      grad[i] = weights[i] * (p - static_cast<double>(X.labels[i]));
      hess[i] = weights[i] * p * (1.0 - p);
    }
    std::vector<std::size_t> rows = n_rows == X.size()
                                        ? iota_rows(X.size())
                                        : rng.sample_without_replacement(X.size(), n_rows);
    std::vector<std::size_t> pool = n_cols == X.dim
                                        ? iota_rows(X.dim)
                                        : rng.sample_without_replacement(X.dim, n_cols);

    Tree tree;
    BoostGrower grower{columns, grad,  hess,             pool,          max_depth,
                       lambda,  gamma, min_child_weight, learning_rate, &tree};
    grower.grow(rows, 0);
    for (std::size_t i = 0; i < X.size(); ++i) margin[i] += tree.eval(X.rows[i]);
    model->trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace tahqiq::models::detail
