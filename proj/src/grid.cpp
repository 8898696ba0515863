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

#include "tahqiq/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "tahqiq/corpus.hpp"
#include "tahqiq/errors.hpp"
#include "tahqiq/eval.hpp"

namespace tahqiq::grid {

namespace {

std::string value_text(const models::ParamValue& v) {
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
  if (std::holds_alternative<double>(v)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(v));
    return buf;
  }
  return std::get<std::string>(v);
}

models::FeatureMatrix subset(const models::FeatureMatrix& X,
                             const std::vector<std::size_t>& idx) {
  models::FeatureMatrix out;
  out.dim = X.dim;
  out.rows.reserve(idx.size());
  out.labels.reserve(idx.size());
  for (std::size_t i : idx) {
    out.rows.push_back(X.rows[i]);
    out.labels.push_back(X.labels[i]);
  }
  return out;
}

}  // namespace

GridResult grid_search(const models::FeatureMatrix& X, const models::ModelSpec& base,
                       const GridSpec& grid, std::size_t folds,
                       std::uint64_t fold_seed) {
  X.validate();
  if (folds < 2) throw DataError("grid search needs at least 2 folds");
  for (const auto& [name, values] : grid)
    if (values.empty())
      throw DataError("empty value list for parameter: " + name);

  std::vector<std::string> names;
  std::size_t combos = 1;
  for (const auto& [name, values] : grid) {
    names.push_back(name);  // map iteration is already sorted ascending
    combos *= values.size();
  }

  auto fold_pairs = corpus::kfold_indices(X.labels, folds, fold_seed, true);

  GridResult result;
  double best_mean = -1.0;
  for (std::size_t c = 0; c < combos; ++c) {
    GridPoint point;
    models::ModelSpec spec = base;
    std::size_t stride = combos;
    for (const auto& name : names) {
      const ValueList& values = grid.at(name);
      stride /= values.size();
      const models::ParamValue& v = values[(c / stride) % values.size()];
      point.params[name] = v;
      spec.params[name] = v;
    }
    models::validate_spec(spec);

    for (const auto& [train_idx, val_idx] : fold_pairs) {
      models::FeatureMatrix train = subset(X, train_idx);
      models::FeatureMatrix val = subset(X, val_idx);
      bool pos = false, neg = false;
      for (int y : train.labels) (y == 1 ? pos : neg) = true;
      if (!pos || !neg)
        throw DataError("fold training subset holds a single class");
      auto model = models::train(train, spec);
      auto scores = models::predict_scores(*model, val);
      point.fold_aucs.push_back(eval::roc_auc(val.labels, scores).second);
    }

    double mean = 0.0;
    for (double a : point.fold_aucs) mean += a;
    mean /= static_cast<double>(point.fold_aucs.size());
    double var = 0.0;
    for (double a : point.fold_aucs) var += (a - mean) * (a - mean);
    var /= static_cast<double>(point.fold_aucs.size());
    point.mean_auc = mean;
    point.std_auc = std::sqrt(var);

    if (mean > best_mean) {
      best_mean = mean;
      result.best = spec;
      result.best_index = c;
    }
    result.table.push_back(std::move(point));
  }

  result.refit = models::train(X, result.best);
  return result;
}

void save_grid_csv(const std::string& path, const GridResult& result) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write grid table: " + path);

  std::vector<std::string> names;
  if (!result.table.empty())
    for (const auto& [name, value] : result.table.front().params)
      names.push_back(name);
  for (const auto& name : names) out << name << ',';
  out << "mean_auc,std_auc\n";

  char buf[40];
  for (const auto& point : result.table) {
    for (const auto& name : names) out << value_text(point.params.at(name)) << ',';
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", point.mean_auc, point.std_auc);
    out << buf;
  }
  if (!out) throw DataError("short write while saving grid table: " + path);
}

}  // namespace tahqiq::grid
