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

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tahqiq/models.hpp"

namespace tahqiq::grid {

using ValueList = std::vector<models::ParamValue>;
using GridSpec = std::map<std::string, ValueList>;

struct GridPoint {
  models::ParamMap params;  // only the swept keys
  std::vector<double> fold_aucs;
  double mean_auc = 0.0;
  double std_auc = 0.0;  // population standard deviation over folds
};

struct GridResult {
  models::ModelSpec best;  // winner with its swept values folded in
  std::size_t best_index = 0;
  std::unique_ptr<models::Model> refit;  // winner retrained on all rows
  std::vector<GridPoint> table;  // enumeration order
};

// Cross-validated sweep over the cartesian product of `grid`. Combinations
// enumerate with parameter names in ascending order, the first name varying
// slowest. Each combination is scored by stratified k-fold AUC; the winner is
// the strictly highest mean (earlier combination wins ties) and is refit on
// the full matrix. An empty grid scores the base spec alone.
GridResult grid_search(const models::FeatureMatrix& X, const models::ModelSpec& base,
                       const GridSpec& grid, std::size_t folds = 5,
                       std::uint64_t fold_seed = 0);

// One row per combination: swept parameters, then mean_auc and std_auc.
void save_grid_csv(const std::string& path, const GridResult& result);

}  // namespace tahqiq::grid
