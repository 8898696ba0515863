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
#include <string>

#include "models_impl.hpp"
#include "tahqiq/corpus.hpp"
#include "tahqiq/errors.hpp"

namespace tahqiq::models::detail {

using nlohmann::json;

namespace {

constexpr double kSvmTol = 1e-3;
constexpr std::size_t kSvmMaxIter = 200000;
constexpr std::size_t kSvmRowGuard = 50000;
constexpr double kTau = 1e-12;

double sparse_sparse_dot(const features::SparseVector& a, const features::SparseVector& b) {
  double acc = 0.0;
  auto ia = a.entries.begin(), ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->col < ib->col) {
      ++ia;
    } else if (ib->col < ia->col) {
      ++ib;
    } else {
      acc += ia->weight * ib->weight;
      ++ia;
      ++ib;
    }
  }
  return acc;
}

struct KernelEval {
  bool rbf;
  double gamma;
  const std::vector<features::SparseVector>* rows;
  std::vector<double> self;  // squared norms, rbf only

  double operator()(std::size_t i, std::size_t j) const {
    double dot = sparse_sparse_dot((*rows)[i], (*rows)[j]);
    if (!rbf) return dot;
    return std::exp(-gamma * (self[i] + self[j] - 2.0 * dot));
  }
};

struct SmoResult {
  std::vector<double> alpha;
  double b = 0.0;
};

// Dual coordinate optimization with maximal-violating-pair working sets:
// min 1/2 a'Qa - e'a  s.t.  y'a = 0, 0 <= a_i <= C_i,  Q_ij = y_i y_j K_ij.
SmoResult solve_smo(const std::vector<features::SparseVector>& rows,
                    const std::vector<double>& y, const std::vector<double>& cap,
                    bool rbf, double gamma) {
  const std::size_t n = rows.size();
  KernelEval kernel{rbf, gamma, &rows, {}};
  if (rbf) {
    kernel.self.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      kernel.self[i] = sparse_sparse_dot(rows[i], rows[i]);
  }

  const bool cache_full = n <= 2048;
  std::vector<double> q_cache;
  std::vector<char> cached;
  if (cache_full) {
    q_cache.resize(n * n);
    cached.assign(n, 0);
  }
  std::vector<double> q_i(n), q_j(n);
  auto q_column = [&](std::size_t c, std::vector<double>& out) {
    if (cache_full && cached[c]) {
      std::copy(q_cache.begin() + c * n, q_cache.begin() + (c + 1) * n, out.begin());
      return;
    }
    for (std::size_t r = 0; r < n; ++r) {
      double k = kernel(c, r);
      if (!std::isfinite(k)) throw SolverError("non-finite kernel value");
      out[r] = y[c] * y[r] * k;
    }
    if (cache_full) {
      std::copy(out.begin(), out.end(), q_cache.begin() + c * n);
      cached[c] = 1;
    }
  };

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);

  std::size_t iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (; iter < kSvmMaxIter; ++iter) {
    // i: most violating in I_up; j: most violating in I_low
    double g_max = -std::numeric_limits<double>::infinity();
    double g_min = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      bool in_up = (y[t] > 0 && alpha[t] < cap[t]) || (y[t] < 0 && alpha[t] > 0);
      bool in_low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < cap[t]);
      double v = -y[t] * grad[t];
      if (in_up && v > g_max) {
        g_max = v;
        i = t;
      }
      if (in_low && v < g_min) {
        g_min = v;
        j = t;
      }
    }
    gap = g_max - g_min;
    if (gap <= kSvmTol) break;
    if (i == n || j == n) break;

    q_column(i, q_i);
    q_column(j, q_j);

    // two-variable subproblem along the feasible direction: a_i moves by
    // +y_i*d, a_j by -y_j*d, so y'a stays constant
    double quad = q_i[i] + q_j[j] - 2.0 * y[i] * y[j] * q_i[j];
    if (quad <= 0.0) quad = kTau;
    double delta = (-y[i] * grad[i] + y[j] * grad[j]) / quad;
    double old_ai = alpha[i], old_aj = alpha[j];

    // box bounds for the new a_j with a_i eliminated via the constraint
    double s = y[i] * (y[i] * old_ai + y[j] * old_aj);
    double lo_j, hi_j;
    if (y[i] == y[j]) {
      lo_j = std::max(0.0, s - cap[i]);
      hi_j = std::min(cap[j], s);
    } else {
      lo_j = std::max(0.0, -s);
      hi_j = std::min(cap[j], cap[i] - s);
    }
    alpha[j] = std::clamp(old_aj - y[j] * delta, lo_j, hi_j);
    alpha[i] = y[i] == y[j] ? s - alpha[j] : s + alpha[j];
    alpha[i] = std::clamp(alpha[i], 0.0, cap[i]);

    double d_i = alpha[i] - old_ai, d_j = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) grad[t] += q_i[t] * d_i + q_j[t] * d_j;
  }
  if (gap > kSvmTol)
    throw SolverError("SMO did not reach tolerance " + std::to_string(kSvmTol) +
                      " within " + std::to_string(kSvmMaxIter) +
                      " iterations (KKT gap " + std::to_string(gap) + ")");

  // b averages the active bounds of the violating-pair interval.
  double g_max = -std::numeric_limits<double>::infinity();
  double g_min = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    bool in_up = (y[t] > 0 && alpha[t] < cap[t]) || (y[t] < 0 && alpha[t] > 0);
    bool in_low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < cap[t]);
    double v = -y[t] * grad[t];
    if (in_up) g_max = std::max(g_max, v);
    if (in_low) g_min = std::min(g_min, v);
  }
  SmoResult result;
  result.alpha = std::move(alpha);
  result.b = (g_max + g_min) / 2.0;
  return result;
}

// Platt scaling: fit P(y=1|f) = 1/(1+exp(a*f+b)) by Newton iterations on the
// regularized target log-loss.
std::pair<double, double> fit_platt(const std::vector<double>& decision,
                                    const std::vector<int>& labels) {
  double prior1 = 0.0, prior0 = 0.0;
  for (int y : labels) (y == 1 ? prior1 : prior0) += 1.0;
  double hi = (prior1 + 1.0) / (prior1 + 2.0);
  double lo = 1.0 / (prior0 + 2.0);
  const std::size_t n = decision.size();
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = labels[i] == 1 ? hi : lo;

  double a = 0.0, b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  auto objective = [&](double pa, double pb) {
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double f = decision[i] * pa + pb;
      if (f >= 0.0)
        obj += target[i] * f + std::log1p(std::exp(-f));
      else
        obj += (target[i] - 1.0) * f + std::log1p(std::exp(f));
    }
    return obj;
  };

  double fval = objective(a, b);
  constexpr double kSigma = 1e-12;
  for (int it = 0; it < 100; ++it) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double f = decision[i] * a + b;
      double p = f >= 0.0 ? std::exp(-f) / (1.0 + std::exp(-f))
                          : 1.0 / (1.0 + std::exp(f));
      double q = 1.0 - p;  // p = P(margin side), q complementary
      double d2 = p * q;
      h11 += decision[i] * decision[i] * d2;
      h22 += d2;
      h21 += decision[i] * d2;
      double d1 = target[i] - p;
      g1 += decision[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
    double det = h11 * h22 - h21 * h21;
    double da = -(h22 * g1 - h21 * g2) / det;
    double db = -(-h21 * g1 + h11 * g2) / det;
    double grad_dot = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= 1e-10) {
      double na = a + step * da, nb = b + step * db;
      double nval = objective(na, nb);
      if (nval < fval + 1e-4 * step * grad_dot) {
        a = na;
        b = nb;
        fval = nval;
        break;
      }
      step /= 2.0;
    }
    if (step < 1e-10) break;
  }
  return {a, b};
}

SmoResult solve_for(const FeatureMatrix& X, const std::vector<std::size_t>& subset,
                    const ModelSpec& spec, std::vector<features::SparseVector>& rows_out,
                    std::vector<double>& y_out) {
  double c = get_num(spec.params, "C");
  std::vector<int> labels;
  rows_out.clear();
  y_out.clear();
  for (std::size_t i : subset) {
    rows_out.push_back(X.rows[i]);
    labels.push_back(X.labels[i]);
    y_out.push_back(X.labels[i] == 1 ? 1.0 : -1.0);
  }
  std::vector<double> w = sample_weights(spec.params, labels);
  std::vector<double> cap(subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i) cap[i] = c * w[i];
  bool rbf = get_str(spec.params, "kernel") == "rbf";
  return solve_smo(rows_out, y_out, cap, rbf, get_num(spec.params, "gamma"));
}

double decision_of(const SmoResult& solved, const std::vector<features::SparseVector>& rows,
                   const std::vector<double>& y, bool rbf, double gamma,
                   const features::SparseVector& x) {
  double self_x = rbf ? sparse_sparse_dot(x, x) : 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (solved.alpha[i] == 0.0) continue;
    double dot = sparse_sparse_dot(rows[i], x);
    double k = rbf ? std::exp(-gamma * (sparse_sparse_dot(rows[i], rows[i]) + self_x -
                                        2.0 * dot))
                   : dot;
    acc += solved.alpha[i] * y[i] * k;
  }
  return acc + solved.b;
}

}  // namespace

double SvmModel::decision(const features::SparseVector& x) const {
  double self_x = rbf ? sparse_sparse_dot(x, x) : 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < support_vectors.size(); ++i) {
    double dot = sparse_sparse_dot(support_vectors[i], x);
    double k = rbf ? std::exp(-gamma * (sparse_sparse_dot(support_vectors[i],
                                                          support_vectors[i]) +
                                        self_x - 2.0 * dot))
                   : dot;
    acc += coefficients[i] * k;
  }
  return acc + b;
}

double SvmModel::score(const features::SparseVector& x) const {
  double f = decision(x);
  if (!calibrated) return f;
  return sigmoid(-(platt_a * f + platt_b));
}

std::string SvmModel::params_json() const {
  json j;
  j["kernel"] = rbf ? "rbf" : "linear";
  j["gamma"] = gamma;
  j["b"] = b;
  j["coefficients"] = coefficients;
  j["sv_indices"] = sv_indices;
  json svs = json::array();
  for (const auto& sv : support_vectors) {
    json entries = json::array();
    for (const auto& e : sv.entries) entries.push_back({e.col, e.weight});
    svs.push_back(entries);
  }
  j["support_vectors"] = svs;
  j["calibrated"] = calibrated;
  if (calibrated) {
    j["platt_a"] = platt_a;
    j["platt_b"] = platt_b;
  }
  return j.dump();
}

std::unique_ptr<Model> train_svm(const FeatureMatrix& X, const ModelSpec& spec) {
  if (X.size() > kSvmRowGuard)
    throw DataError("kernel SVM guard: more than 50000 training rows");
  bool rbf = get_str(spec.params, "kernel") == "rbf";
  double gamma = get_num(spec.params, "gamma");
  bool probability = get_bool(spec.params, "probability");

  std::vector<std::size_t> all(X.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<features::SparseVector> rows;
  std::vector<double> y;
  SmoResult solved = solve_for(X, all, spec, rows, y);

  auto model = std::make_unique<SvmModel>(spec, X.dim);
  model->rbf = rbf;
  model->gamma = gamma;
  model->b = solved.b;
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (solved.alpha[i] > 0.0) {
      model->support_vectors.push_back(X.rows[i]);
      model->coefficients.push_back(solved.alpha[i] * y[i]);
      model->sv_indices.push_back(i);
    }
  }

  if (probability) {
    // Platt sigmoid fit on 3-fold out-of-fold decision values.
    auto folds = corpus::kfold_indices(X.labels, 3, spec.seed, true);
    std::vector<double> oof_decision;
    std::vector<int> oof_labels;
    for (const auto& [train_idx, val_idx] : folds) {
      std::vector<features::SparseVector> fold_rows;
      std::vector<double> fold_y;
      SmoResult fold_solved = solve_for(X, train_idx, spec, fold_rows, fold_y);
      for (std::size_t i : val_idx) {
        oof_decision.push_back(
            decision_of(fold_solved, fold_rows, fold_y, rbf, gamma, X.rows[i]));
        oof_labels.push_back(X.labels[i]);
      }
    }
    auto [a, pb] = fit_platt(oof_decision, oof_labels);
    model->calibrated = true;
    model->platt_a = a;
    model->platt_b = pb;
  }
  return model;
}

}  // namespace tahqiq::models::detail
