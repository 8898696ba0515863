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
#include <limits>
#include <numeric>

#include "models_impl.hpp"
#include "tahqiq/errors.hpp"
#include "tahqiq/rng.hpp"

namespace tahqiq::models::detail {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Multinomial naive Bayes

features::SparseVector NbModel::rescale(const features::SparseVector& x) const {
  std::vector<double> dense(dim_, 0.0);
  for (const auto& e : x.entries) dense[e.col] = e.weight;
  features::SparseVector out;
  out.dim = dim_;
  for (std::size_t c = 0; c < dim_; ++c) {
    double v = feat_range[c] > 0.0 ? (dense[c] - feat_min[c]) / feat_range[c] : 0.0;
    v = std::clamp(v, 0.0, 1.0);
    if (v != 0.0) out.entries.push_back({static_cast<std::uint32_t>(c), v});
  }
  return out;
}

double NbModel::score(const features::SparseVector& input) const {
  features::SparseVector shifted;
  const features::SparseVector* x = &input;
  if (minmax) {
    shifted = rescale(input);
    x = &shifted;
  }
  double joint0 = log_prior[0], joint1 = log_prior[1];
  for (const auto& e : x->entries) {
    if (e.weight < 0.0) throw DataError("naive Bayes requires non-negative features");
    joint0 += e.weight * log_prob0[e.col];
    joint1 += e.weight * log_prob1[e.col];
  }
  double peak = std::max(joint0, joint1);
  double z0 = std::exp(joint0 - peak), z1 = std::exp(joint1 - peak);
  return z1 / (z0 + z1);
}

std::string NbModel::params_json() const {
  json j;
  j["log_prior"] = log_prior;
  j["log_prob0"] = log_prob0;
  j["log_prob1"] = log_prob1;
  j["minmax"] = minmax;
  if (minmax) {
    j["feat_min"] = feat_min;
    j["feat_range"] = feat_range;
  }
  return j.dump();
}

std::unique_ptr<Model> train_nb(const FeatureMatrix& X, const ModelSpec& spec) {
  double alpha = get_num(spec.params, "alpha");
  bool fit_prior = get_bool(spec.params, "fit_prior");
  bool minmax = get_bool(spec.params, "minmax");
  std::vector<double> w = sample_weights(spec.params, X.labels);

  auto model = std::make_unique<NbModel>(spec, X.dim);
  model->minmax = minmax;

  std::vector<features::SparseVector> scaled;
  const std::vector<features::SparseVector>* rows = &X.rows;
  if (minmax) {
    model->feat_min.assign(X.dim, 0.0);
    std::vector<double> feat_max(X.dim, 0.0);
    std::vector<std::size_t> seen(X.dim, 0);
    for (const auto& row : X.rows) {
      for (const auto& e : row.entries) {
        if (seen[e.col] == 0) {
          model->feat_min[e.col] = e.weight;
          feat_max[e.col] = e.weight;
        } else {
          model->feat_min[e.col] = std::min(model->feat_min[e.col], e.weight);
          feat_max[e.col] = std::max(feat_max[e.col], e.weight);
        }
        ++seen[e.col];
      }
    }
    for (std::size_t c = 0; c < X.dim; ++c) {
      if (seen[c] < X.size()) {
        // implicit zeros participate in the per-feature extrema
        model->feat_min[c] = std::min(model->feat_min[c], 0.0);
        feat_max[c] = std::max(feat_max[c], 0.0);
      }
      if (seen[c] == 0) model->feat_min[c] = feat_max[c] = 0.0;
    }
    model->feat_range.resize(X.dim);
    for (std::size_t c = 0; c < X.dim; ++c)
      model->feat_range[c] = feat_max[c] - model->feat_min[c];
    scaled.reserve(X.size());
    for (const auto& row : X.rows) scaled.push_back(model->rescale(row));
    rows = &scaled;
  }

  std::array<double, 2> class_weight_sum{0.0, 0.0};
  std::vector<double> counts0(X.dim, 0.0), counts1(X.dim, 0.0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    auto& counts = X.labels[i] == 1 ? counts1 : counts0;
    for (const auto& e : (*rows)[i].entries) {
      if (e.weight < 0.0) throw DataError("naive Bayes requires non-negative features");
      counts[e.col] += w[i] * e.weight;
    }
    class_weight_sum[X.labels[i]] += w[i];
  }

  double total0 = std::accumulate(counts0.begin(), counts0.end(), 0.0);
  double total1 = std::accumulate(counts1.begin(), counts1.end(), 0.0);
  double d = static_cast<double>(X.dim);
  model->log_prob0.resize(X.dim);
  model->log_prob1.resize(X.dim);
  for (std::size_t c = 0; c < X.dim; ++c) {
    model->log_prob0[c] = std::log((counts0[c] + alpha) / (total0 + alpha * d));
    model->log_prob1[c] = std::log((counts1[c] + alpha) / (total1 + alpha * d));
  }
  if (fit_prior) {
    double total_w = class_weight_sum[0] + class_weight_sum[1];
    if (class_weight_sum[0] <= 0.0 || class_weight_sum[1] <= 0.0)
      throw DataError("naive Bayes with fitted priors needs both classes present");
    model->log_prior = {std::log(class_weight_sum[0] / total_w),
                        std::log(class_weight_sum[1] / total_w)};
  } else {
    model->log_prior = {std::log(0.5), std::log(0.5)};
  }
  return model;
}

// ---------------------------------------------------------------------------
// SGD linear model, modified-Huber loss, L2 penalty

namespace {

constexpr double kSgdTol = 1e-4;
constexpr std::size_t kSgdPatience = 5;

double modified_huber_loss(double z) {
  if (z >= 1.0) return 0.0;
  if (z >= -1.0) {
    double m = 1.0 - z;
    return m * m;
  }
  return -4.0 * z;
}

// dL/df for label y in {-1,+1} at margin z = y*f.
double modified_huber_dloss(double z, double y) {
  if (z >= 1.0) return 0.0;
  if (z >= -1.0) return -2.0 * (1.0 - z) * y;
  return -4.0 * y;
}

}  // namespace

double SgdModel::decision(const features::SparseVector& x) const {
  return sparse_dot(x, weights) + bias;
}

double SgdModel::score(const features::SparseVector& x) const {
  return std::clamp((1.0 + decision(x)) / 2.0, 0.0, 1.0);
}

std::string SgdModel::params_json() const {
  json j;
  j["weights"] = weights;
  j["bias"] = bias;
  j["epochs_run"] = epochs_run;
  return j.dump();
}

std::unique_ptr<Model> train_sgd(const FeatureMatrix& X, const ModelSpec& spec) {
  double alpha = get_num(spec.params, "alpha");
  std::size_t max_iter = static_cast<std::size_t>(get_num(spec.params, "max_iter"));
  std::vector<double> w = sample_weights(spec.params, X.labels);

  // Bottou's schedule: eta_t = 1/(alpha*(t0+t)) with t0 from the typical
  // weight scale alpha^(-1/4).
  double typw = std::sqrt(1.0 / std::sqrt(alpha));
  double eta0 = typw / std::max(1.0, modified_huber_dloss(-typw, 1.0));
  double t0 = 1.0 / (alpha * eta0);

  std::vector<double> v(X.dim, 0.0);
  double scale = 1.0;
  double bias = 0.0;
  double weight_total = std::accumulate(w.begin(), w.end(), 0.0);

  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(splitmix64(spec.seed));

  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t stall = 0;
  std::size_t epochs = 0;
  double t = 0.0;

  for (std::size_t epoch = 0; epoch < max_iter; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t i : order) {
      t += 1.0;
      double eta = 1.0 / (alpha * (t0 + t));
      const auto& x = X.rows[i];
      double y = X.labels[i] == 1 ? 1.0 : -1.0;
      double f = scale * sparse_dot(x, v) + bias;
      double z = y * f;
      loss_sum += w[i] * modified_huber_loss(z);

      scale *= 1.0 - eta * alpha;
      if (scale < 1e-9) {
        for (double& vj : v) vj *= scale;
        scale = 1.0;
      }
      double g = w[i] * modified_huber_dloss(z, y);
      if (g != 0.0) {
        double step = eta * g / scale;
        for (const auto& e : x.entries) v[e.col] -= step * e.weight;
        bias -= eta * g;
      }
    }
    ++epochs;
    double epoch_loss = loss_sum / weight_total;
    if (epoch_loss < best_loss - kSgdTol) {
      best_loss = epoch_loss;
      stall = 0;
    } else if (++stall >= kSgdPatience) {
      break;
    }
  }

  auto model = std::make_unique<SgdModel>(spec, X.dim);
  model->weights.resize(X.dim);
  for (std::size_t c = 0; c < X.dim; ++c) model->weights[c] = scale * v[c];
  model->bias = bias;
  model->epochs_run = epochs;
  return model;
}

}  // namespace tahqiq::models::detail
