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
#include <string>
#include <utility>
#include <vector>

namespace tahqiq::eval {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
};

// Points run from exactly (0, 0) to exactly (1, 1); tied scores collapse into
// a single step. thresholds[i] is the cut producing points[i] (classify
// positive when score >= threshold); thresholds[0] is +infinity.
struct RocCurve {
  std::vector<double> fpr;
  std::vector<double> tpr;
  std::vector<double> thresholds;

  std::size_t size() const { return fpr.size(); }
};

struct MetricsReport {
  double accuracy = 0.0;
  double auc = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionCounts confusion;
};

// labels and predictions are 0/1.
ConfusionCounts confusion(const std::vector<int>& labels,
                          const std::vector<int>& predicted);

// Trapezoidal AUC over the tie-grouped ROC curve; identical to the
// Mann-Whitney statistic (concordant pairs count 1, tied pairs 1/2).
// Throws DataError("AUC undefined...") unless both classes are present.
std::pair<RocCurve, double> roc_auc(const std::vector<int>& labels,
                                    const std::vector<double>& scores);

// Direct O(P*N) concordance count. Cross-check for roc_auc only.
double auc_pair_oracle(const std::vector<int>& labels,
                       const std::vector<double>& scores);

// Thresholds scores at `threshold` (>= means positive) for the confusion
// block and derives accuracy/precision/recall/F1; AUC via roc_auc.
MetricsReport compute_metrics(const std::vector<int>& labels,
                              const std::vector<double>& scores,
                              double threshold = 0.5);

std::string metrics_json(const MetricsReport& report);
MetricsReport metrics_from_json(const std::string& text);

// CSV with header "threshold,fpr,tpr", one row per curve point.
void save_roc_csv(const std::string& path, const RocCurve& curve);

}  // namespace tahqiq::eval
