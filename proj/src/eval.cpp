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

#include "tahqiq/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "tahqiq/errors.hpp"

namespace tahqiq::eval {

namespace {

void check_binary_labels(const std::vector<int>& labels) {
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
  }
}

void check_finite_scores(const std::vector<double>& scores) {
  for (double s : scores) {
    if (!std::isfinite(s)) throw DataError("scores must be finite");
  }
}

std::pair<std::size_t, std::size_t> class_counts(const std::vector<int>& labels) {
  std::size_t pos = 0;
  for (int y : labels) pos += static_cast<std::size_t>(y);
  return {pos, labels.size() - pos};
}

}  // namespace

ConfusionCounts confusion(const std::vector<int>& labels,
                          const std::vector<int>& predicted) {
  if (labels.size() != predicted.size())
    throw DataError("confusion: labels and predictions differ in length");
  check_binary_labels(labels);
  check_binary_labels(predicted);
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      if (predicted[i] == 1)
        ++c.tp;
      else
        ++c.fn;
    } else {
      if (predicted[i] == 1)
        ++c.fp;
      else
        ++c.tn;
    }
  }
  return c;
}

std::pair<RocCurve, double> roc_auc(const std::vector<int>& labels,
                                    const std::vector<double>& scores) {
  if (labels.size() != scores.size())
    throw DataError("roc_auc: labels and scores differ in length");
  check_binary_labels(labels);
  check_finite_scores(scores);
  auto [pos, neg] = class_counts(labels);
  if (pos == 0 || neg == 0)
    throw DataError("AUC undefined: both classes must be present");

  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve curve;
  curve.fpr.push_back(0.0);
  curve.tpr.push_back(0.0);
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());

  // Integer accumulation keeps the trapezoid sum an exact rational so it
  // agrees bit-for-bit with pair counting: each tie group with p positives
  // and n negatives above `tp` prior positives adds n*(2*tp + p) to twice
  // the unnormalized area.
  std::uint64_t tp = 0, fp = 0;
  std::uint64_t twice_area = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::uint64_t group_pos = 0, group_neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]] == 1)
        ++group_pos;
      else
        ++group_neg;
      ++j;
    }
    twice_area += group_neg * (2 * tp + group_pos);
    tp += group_pos;
    fp += group_neg;
    curve.fpr.push_back(static_cast<double>(fp) / static_cast<double>(neg));
    curve.tpr.push_back(static_cast<double>(tp) / static_cast<double>(pos));
    curve.thresholds.push_back(scores[order[i]]);
    i = j;
  }

  double auc = static_cast<double>(twice_area) /
               (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return {std::move(curve), auc};
}

double auc_pair_oracle(const std::vector<int>& labels,
                       const std::vector<double>& scores) {
  if (labels.size() != scores.size())
    throw DataError("auc_pair_oracle: labels and scores differ in length");
  check_binary_labels(labels);
  check_finite_scores(scores);
  auto [pos, neg] = class_counts(labels);
  if (pos == 0 || neg == 0)
    throw DataError("AUC undefined: both classes must be present");

  std::uint64_t twice_concordant = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] != 0) continue;
      if (scores[i] > scores[j])
        twice_concordant += 2;
      else if (scores[i] == scores[j])
        twice_concordant += 1;
    }
  }
  return static_cast<double>(twice_concordant) /
         (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

MetricsReport compute_metrics(const std::vector<int>& labels,
                              const std::vector<double>& scores,
                              double threshold) {
  if (labels.empty()) throw DataError("compute_metrics: empty input");
  if (labels.size() != scores.size())
    throw DataError("compute_metrics: labels and scores differ in length");
  check_finite_scores(scores);

  std::vector<int> predicted(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    predicted[i] = scores[i] >= threshold ? 1 : 0;

  MetricsReport r;
  r.confusion = confusion(labels, predicted);
  const auto& c = r.confusion;
  double tp = static_cast<double>(c.tp);
  r.accuracy = (tp + static_cast<double>(c.tn)) / static_cast<double>(c.total());
  r.precision = c.tp + c.fp > 0 ? tp / static_cast<double>(c.tp + c.fp) : 0.0;
  r.recall = c.tp + c.fn > 0 ? tp / static_cast<double>(c.tp + c.fn) : 0.0;
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  r.auc = roc_auc(labels, scores).second;
  return r;
}

std::string metrics_json(const MetricsReport& report) {
  nlohmann::json j;
  j["accuracy"] = report.accuracy;
  j["auc"] = report.auc;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["confusion"] = {{"tp", report.confusion.tp},
                    {"fp", report.confusion.fp},
                    {"tn", report.confusion.tn},
                    {"fn", report.confusion.fn}};
  return j.dump(2);
}

MetricsReport metrics_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw DataError("metrics_from_json: malformed JSON");
  try {
    MetricsReport r;
    r.accuracy = j.at("accuracy").get<double>();
    r.auc = j.at("auc").get<double>();
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f1 = j.at("f1").get<double>();
    const auto& c = j.at("confusion");
    r.confusion.tp = c.at("tp").get<std::size_t>();
    r.confusion.fp = c.at("fp").get<std::size_t>();
    r.confusion.tn = c.at("tn").get<std::size_t>();
    r.confusion.fn = c.at("fn").get<std::size_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("metrics_from_json: ") + e.what());
  }
}

void save_roc_csv(const std::string& path, const RocCurve& curve) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "threshold,fpr,tpr\n";
  char buf[96];
  for (std::size_t i = 0; i < curve.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", curve.thresholds[i],
                  curve.fpr[i], curve.tpr[i]);
    out << buf;
  }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace tahqiq::eval
