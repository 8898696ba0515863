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

#include "tahqiq/models.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "models_impl.hpp"
#include "tahqiq/errors.hpp"

namespace tahqiq::models {

using nlohmann::json;

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::nb: return "nb";
    case ModelKind::sgd: return "sgd";
    case ModelKind::svm: return "svm";
    case ModelKind::rf: return "rf";
    case ModelKind::gbt: return "gbt";
  }
  throw DataError("unknown model kind");
}

ModelKind kind_from_string(const std::string& name) {
  if (name == "nb") return ModelKind::nb;
  if (name == "sgd") return ModelKind::sgd;
  if (name == "svm") return ModelKind::svm;
  if (name == "rf") return ModelKind::rf;
  if (name == "gbt") return ModelKind::gbt;
  throw DataError("unknown model kind: " + name);
}

ParamMap default_params(ModelKind kind) {
  switch (kind) {
    case ModelKind::nb:
      return {{"alpha", 0.5},
              {"fit_prior", true},
              {"class_weight", std::string("none")},
              {"minmax", false}};
    case ModelKind::sgd:
      return {{"alpha", 0.0056},
              {"l1_ratio", 0.13},
              {"loss", std::string("modified_huber")},
              {"penalty", std::string("l2")},
              {"max_iter", 6000.0},
              {"class_weight", std::string("balanced")}};
    case ModelKind::svm:
      return {{"C", 1.0},
              {"gamma", 1.0},
              {"kernel", std::string("rbf")},
              {"probability", true},
              {"class_weight", std::string("balanced")}};
    case ModelKind::rf:
      return {{"criterion", std::string("entropy")},
              {"max_depth", 8.0},
              {"max_features", std::string("log2")},
              {"n_estimators", 500.0},
              {"class_weight", std::string("balanced")}};
    case ModelKind::gbt:
      return {{"colsample_bytree", 0.8},
              {"gamma", 2.0},
              {"max_depth", 5.0},
              {"min_child_weight", 1.0},
              {"subsample", 1.0},
              {"n_rounds", 100.0},
              {"learning_rate", 0.3},
              {"lambda", 1.0},
              {"class_weight", std::string("none")}};
  }
  throw DataError("unknown model kind");
}

namespace {

void require_range(const std::string& key, double v, double lo, double hi) {
  if (!(v >= lo && v <= hi))
    throw DataError("parameter out of range: " + key);
}

void require_choice(const std::string& key, const std::string& v,
                    std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return;
  throw DataError("unsupported value for " + key + ": " + v);
}

}  // namespace

void validate_spec(const ModelSpec& spec) {
  ParamMap defaults = default_params(spec.kind);
  for (const auto& [key, value] : spec.params) {
    auto it = defaults.find(key);
    if (it == defaults.end())
      throw DataError("unknown parameter for " + to_string(spec.kind) + ": " + key);
    if (value.index() != it->second.index())
      throw DataError("wrong type for parameter: " + key);
  }
  ParamMap merged = defaults;
  for (const auto& [key, value] : spec.params) merged[key] = value;

  if (merged.count("class_weight"))
    require_choice("class_weight", std::get<std::string>(merged["class_weight"]),
                   {"none", "balanced"});
  switch (spec.kind) {
    case ModelKind::nb:
      require_range("alpha", std::get<double>(merged["alpha"]), 0.0, 1e9);
      break;
    case ModelKind::sgd: {
      double alpha = std::get<double>(merged["alpha"]);
      if (!(alpha > 0.0)) throw DataError("parameter out of range: alpha");
      require_range("l1_ratio", std::get<double>(merged["l1_ratio"]), 0.0, 1.0);
      require_choice("loss", std::get<std::string>(merged["loss"]), {"modified_huber"});
      require_choice("penalty", std::get<std::string>(merged["penalty"]), {"l2"});
      require_range("max_iter", std::get<double>(merged["max_iter"]), 1.0, 1e7);
      break;
    }
    case ModelKind::svm: {
      double c = std::get<double>(merged["C"]);
      double gamma = std::get<double>(merged["gamma"]);
      if (!(c > 0.0)) throw DataError("parameter out of range: C");
      if (!(gamma > 0.0)) throw DataError("parameter out of range: gamma");
      require_choice("kernel", std::get<std::string>(merged["kernel"]), {"rbf", "linear"});
      break;
    }
    case ModelKind::rf:
      require_choice("criterion", std::get<std::string>(merged["criterion"]), {"entropy"});
      require_choice("max_features", std::get<std::string>(merged["max_features"]), {"log2"});
      require_range("max_depth", std::get<double>(merged["max_depth"]), 1.0, 64.0);
      require_range("n_estimators", std::get<double>(merged["n_estimators"]), 1.0, 1e5);
      break;
    case ModelKind::gbt: {
      double cs = std::get<double>(merged["colsample_bytree"]);
      double ss = std::get<double>(merged["subsample"]);
      if (!(cs > 0.0 && cs <= 1.0)) throw DataError("parameter out of range: colsample_bytree");
      if (!(ss > 0.0 && ss <= 1.0)) throw DataError("parameter out of range: subsample");
      require_range("gamma", std::get<double>(merged["gamma"]), 0.0, 1e9);
      require_range("max_depth", std::get<double>(merged["max_depth"]), 1.0, 64.0);
      require_range("min_child_weight", std::get<double>(merged["min_child_weight"]), 0.0, 1e9);
      require_range("n_rounds", std::get<double>(merged["n_rounds"]), 0.0, 1e5);
      double lr = std::get<double>(merged["learning_rate"]);
      if (!(lr > 0.0 && lr <= 1.0)) throw DataError("parameter out of range: learning_rate");
      require_range("lambda", std::get<double>(merged["lambda"]), 0.0, 1e9);
      break;
    }
  }
}

namespace detail {

double get_num(const ParamMap& params, const std::string& key) {
  return std::get<double>(params.at(key));
}

std::string get_str(const ParamMap& params, const std::string& key) {
  return std::get<std::string>(params.at(key));
}

bool get_bool(const ParamMap& params, const std::string& key) {
  return std::get<bool>(params.at(key));
}

std::vector<double> sample_weights(const ParamMap& params, const std::vector<int>& labels) {
  std::vector<double> w(labels.size(), 1.0);
  if (params.count("class_weight") && get_str(params, "class_weight") == "balanced") {
    ClassWeights cw = balanced_weights(labels);
    for (std::size_t i = 0; i < labels.size(); ++i)
      w[i] = labels[i] == 1 ? cw.w1 : cw.w0;
  }
  return w;
}

std::vector<std::vector<double>> densify_columns(const FeatureMatrix& X) {
  if (X.size() * X.dim > 50'000'000)
    throw DataError("feature matrix too large for tree learners");
  std::vector<std::vector<double>> columns(X.dim, std::vector<double>(X.size(), 0.0));
  for (std::size_t i = 0; i < X.size(); ++i)
    for (const auto& e : X.rows[i].entries) columns[e.col][i] = e.weight;
  return columns;
}

nlohmann::json params_to_json(const ParamMap& params) {
  json j = json::object();
  for (const auto& [key, value] : params) {
    if (std::holds_alternative<bool>(value))
      j[key] = std::get<bool>(value);
    else if (std::holds_alternative<double>(value))
      j[key] = std::get<double>(value);
    else
      j[key] = std::get<std::string>(value);
  }
  return j;
}

ParamMap params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("params must be a JSON object");
  ParamMap params;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it->is_boolean())
      params[it.key()] = it->get<bool>();
    else if (it->is_number())
      params[it.key()] = it->get<double>();
    else if (it->is_string())
      params[it.key()] = it->get<std::string>();
    else
      throw DataError("unsupported parameter type for: " + it.key());
  }
  return params;
}

double Tree::eval(const features::SparseVector& x) const {
  std::size_t node = 0;
  while (!nodes[node].is_leaf) {
    const TreeNode& n = nodes[node];
    double v = 0.0;
    const auto& entries = x.entries;
    auto it = std::lower_bound(entries.begin(), entries.end(), n.feature,
                               [](const features::SparseEntry& e, std::size_t f) {
                                 return e.col < f;
                               });
    if (it != entries.end() && it->col == n.feature) v = it->weight;
    node = v <= n.threshold ? static_cast<std::size_t>(n.left)
                            : static_cast<std::size_t>(n.right);
  }
  return nodes[node].value;
}

nlohmann::json Tree::to_json() const {
  json arr = json::array();
  for (const TreeNode& n : nodes) {
    if (n.is_leaf) {
      arr.push_back({{"v", n.value}});
    } else {
      arr.push_back({{"f", n.feature}, {"t", n.threshold}, {"l", n.left}, {"r", n.right}});
    }
  }
  return arr;
}

Tree Tree::from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw DataError("malformed tree");
  Tree tree;
  for (const auto& item : j) {
    TreeNode n;
    if (item.contains("f")) {
      n.is_leaf = false;
      n.feature = item.at("f").get<std::size_t>();
      n.threshold = item.at("t").get<double>();
      n.left = item.at("l").get<std::int32_t>();
      n.right = item.at("r").get<std::int32_t>();
    } else {
      n.value = item.at("v").get<double>();
    }
    tree.nodes.push_back(n);
  }
  for (const TreeNode& n : tree.nodes) {
    if (!n.is_leaf &&
        (n.left < 0 || n.right < 0 ||
         static_cast<std::size_t>(n.left) >= tree.nodes.size() ||
         static_cast<std::size_t>(n.right) >= tree.nodes.size()))
      throw DataError("malformed tree: child index out of range");
  }
  return tree;
}

}  // namespace detail

std::string spec_json(const ModelSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  j["seed"] = spec.seed;
  j["params"] = detail::params_to_json(spec.params);
  return j.dump();
}

ModelSpec spec_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("malformed model spec JSON");
  try {
    ModelSpec spec;
    spec.kind = kind_from_string(j.at("kind").get<std::string>());
    spec.seed = j.value("seed", 0ULL);
    if (j.contains("params")) spec.params = detail::params_from_json(j.at("params"));
    validate_spec(spec);
    return spec;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model spec JSON: ") + e.what());
  }
}

ClassWeights balanced_weights(const std::vector<int>& labels) {
  std::size_t pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
    pos += static_cast<std::size_t>(y);
  }
  std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0)
    throw DataError("balanced weights need both classes present");
  double n = static_cast<double>(labels.size());
  return {n / (2.0 * static_cast<double>(neg)), n / (2.0 * static_cast<double>(pos))};
}

void FeatureMatrix::validate() const {
  if (rows.size() != labels.size())
    throw DataError("feature matrix: rows and labels differ in length");
  if (rows.empty()) throw DataError("feature matrix: empty");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      throw DataError("feature matrix: labels must be 0 or 1");
    if (rows[i].dim != dim) throw DataError("feature matrix: row dimension mismatch");
    for (const auto& e : rows[i].entries)
      if (e.col >= dim) throw DataError("feature matrix: column out of range");
  }
}

FeatureMatrix FeatureMatrix::from_dense(const std::vector<std::vector<double>>& dense,
                                        std::vector<int> labels) {
  FeatureMatrix X;
  X.labels = std::move(labels);
  for (const auto& row : dense) {
    features::SparseVector v;
    v.dim = row.size();
    for (std::size_t c = 0; c < row.size(); ++c)
      if (row[c] != 0.0) v.entries.push_back({static_cast<std::uint32_t>(c), row[c]});
    X.rows.push_back(std::move(v));
  }
  X.dim = dense.empty() ? 0 : dense[0].size();
  X.validate();
  return X;
}

FeatureMatrix FeatureMatrix::from_records(const std::vector<features::VectorRecord>& records) {
  FeatureMatrix X;
  for (const auto& rec : records) {
    if (!rec.label.has_value())
      throw DataError("record without label cannot enter a training matrix: " + rec.id);
    X.rows.push_back(rec.vector);
    X.labels.push_back(*rec.label);
    X.dim = std::max(X.dim, rec.vector.dim);
  }
  for (auto& row : X.rows) row.dim = X.dim;
  X.validate();
  return X;
}

std::unique_ptr<Model> train(const FeatureMatrix& X, const ModelSpec& spec) {
  X.validate();
  validate_spec(spec);
  ModelSpec full = spec;
  ParamMap merged = default_params(spec.kind);
  for (const auto& [key, value] : spec.params) merged[key] = value;
  full.params = std::move(merged);
  switch (spec.kind) {
    case ModelKind::nb: return detail::train_nb(X, full);
    case ModelKind::sgd: return detail::train_sgd(X, full);
    case ModelKind::svm: return detail::train_svm(X, full);
    case ModelKind::rf: return detail::train_rf(X, full);
    case ModelKind::gbt: return detail::train_gbt(X, full);
  }
  throw DataError("unknown model kind");
}

double predict_score(const Model& model, const features::SparseVector& x) {
  if (x.dim != model.dim())
    throw DataError("predict: feature dimension mismatch");
  return model.score(x);
}

std::vector<double> predict_scores(const Model& model, const FeatureMatrix& X) {
  std::vector<double> scores;
  scores.reserve(X.size());
  for (const auto& row : X.rows) scores.push_back(predict_score(model, row));
  return scores;
}

int predict_label(const Model& model, const features::SparseVector& x, double threshold) {
  return predict_score(model, x) >= threshold ? 1 : 0;
}

int predict_label(const Model& model, const features::SparseVector& x) {
  return predict_label(model, x, model.default_threshold());
}

void save_model(const std::string& path, const Model& model) {
  json j;
  j["format"] = "tahqiq-model";
  j["version"] = 1;
  j["kind"] = to_string(model.kind());
  j["seed"] = model.spec().seed;
  j["spec"] = detail::params_to_json(model.spec().params);
  j["dim"] = model.dim();
  j["params"] = json::parse(model.params_json());
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw DataError("write failed: " + path);
}

std::unique_ptr<Model> load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("format", "") != "tahqiq-model")
    throw DataError("not a model file: " + path);
  try {
    return detail::model_from_json(j);
  } catch (const json::exception& e) {
    throw DataError("malformed model file " + path + ": " + e.what());
  }
}

namespace {

struct SortedFeatureValues {
  std::vector<double> values;
  std::vector<std::size_t> order;  // node-row positions sorted by value
};

SortedFeatureValues sort_by_feature(const std::vector<double>& column,
                                    const std::vector<std::size_t>& rows) {
  SortedFeatureValues out;
  out.order.resize(rows.size());
  for (std::size_t p = 0; p < rows.size(); ++p) out.order[p] = p;
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return column[rows[a]] < column[rows[b]];
                   });
  out.values.resize(rows.size());
  for (std::size_t p = 0; p < rows.size(); ++p)
    out.values[p] = column[rows[out.order[p]]];
  return out;
}

double entropy(double w0, double w1) {
  double total = w0 + w1;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  if (w0 > 0.0) {
    double p = w0 / total;
    h -= p * std::log(p);
  }
  if (w1 > 0.0) {
    double p = w1 / total;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

SplitCandidate best_entropy_split(const std::vector<std::vector<double>>& columns,
                                  const std::vector<int>& labels,
                                  const std::vector<double>& weights,
                                  const std::vector<std::size_t>& rows,
                                  const std::vector<std::size_t>& features) {
  SplitCandidate best;
  if (rows.size() < 2) return best;
  double total0 = 0.0, total1 = 0.0;
  for (std::size_t r : rows)
    (labels[r] == 1 ? total1 : total0) += weights[r];
  double total = total0 + total1;
  double h_parent = entropy(total0, total1);
  if (h_parent <= 0.0) return best;

  for (std::size_t f : features) {
    auto sorted = sort_by_feature(columns[f], rows);
    double left0 = 0.0, left1 = 0.0;
    for (std::size_t p = 0; p + 1 < rows.size(); ++p) {
      std::size_t r = rows[sorted.order[p]];
      (labels[r] == 1 ? left1 : left0) += weights[r];
      if (sorted.values[p] == sorted.values[p + 1]) continue;
      double threshold = 0.5 * (sorted.values[p] + sorted.values[p + 1]);
      double right0 = total0 - left0, right1 = total1 - left1;
      double wl = left0 + left1, wr = right0 + right1;
      double gain = h_parent - (wl / total) * entropy(left0, left1) -
                    (wr / total) * entropy(right0, right1);
      if (gain > best.gain && gain > 0.0) {
        best.found = true;
        best.feature = f;
        best.threshold = threshold;
        best.gain = gain;
      }
    }
  }
  return best;
}

SplitCandidate best_gain_split(const std::vector<std::vector<double>>& columns,
                               const std::vector<double>& grad,
                               const std::vector<double>& hess,
                               const std::vector<std::size_t>& rows,
                               const std::vector<std::size_t>& features,
                               double lambda, double gamma,
                               double min_child_weight) {
  SplitCandidate best;
  if (rows.size() < 2) return best;
  double g_total = 0.0, h_total = 0.0;
  for (std::size_t r : rows) {
    g_total += grad[r];
    h_total += hess[r];
  }
  double parent_term = g_total * g_total / (h_total + lambda);

  for (std::size_t f : features) {
    auto sorted = sort_by_feature(columns[f], rows);
    double g_left = 0.0, h_left = 0.0;
    for (std::size_t p = 0; p + 1 < rows.size(); ++p) {
      std::size_t r = rows[sorted.order[p]];
      g_left += grad[r];
      h_left += hess[r];
      if (sorted.values[p] == sorted.values[p + 1]) continue;
      double h_right = h_total - h_left;
      if (h_left < min_child_weight || h_right < min_child_weight) continue;
      double g_right = g_total - g_left;
      double gain = 0.5 * (g_left * g_left / (h_left + lambda) +
                           g_right * g_right / (h_right + lambda) - parent_term) -
                    gamma;
      if (gain > best.gain && gain > 0.0) {
        best.found = true;
        best.feature = f;
        best.threshold = 0.5 * (sorted.values[p] + sorted.values[p + 1]);
        best.gain = gain;
      }
    }
  }
  return best;
}

}  // namespace tahqiq::models
