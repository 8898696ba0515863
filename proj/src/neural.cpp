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

#include "tahqiq/neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "tahqiq/errors.hpp"
#include "tahqiq/eval.hpp"
#include "tahqiq/kernels.hpp"
#include "tahqiq/rng.hpp"

namespace tahqiq::neural {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

constexpr double kProbFloor = 1e-7;

// Per-example activations needed by the backward pass.
struct ForwardCache {
  std::vector<double> scores;
  std::vector<std::size_t> argmax;  // rows x total_filters, pool winner
  std::vector<double> pooled;       // rows x total_filters, post-ReLU
  std::vector<double> mask;         // rows x total_filters, dropout scale
};

void gather_embeddings(const CnnModel& model, const std::int32_t* ids,
                       std::size_t len, double* out) {
  std::size_t d = model.cfg.embed_dim;
  const double* table = model.params.data() + model.embed_offset();
  for (std::size_t p = 0; p < len; ++p)
    std::memcpy(out + p * d, table + static_cast<std::size_t>(ids[p]) * d,
                d * sizeof(double));
}

std::vector<double> forward_rows(const CnnModel& model, const PaddedBatch& batch,
                                 const std::vector<std::size_t>& rows,
                                 bool train_mode, Rng* rng, ForwardCache* cache) {
  const CnnConfig& cfg = model.cfg;
  if (batch.max_len != cfg.max_sequence_length)
    throw DataError("batch sequence length does not match the model");
  std::size_t d = cfg.embed_dim, nf = cfg.filters_per_kernel;
  std::size_t total = model.total_filters();
  double keep = 1.0 - cfg.dropout;

  if (cache) {
    cache->scores.assign(rows.size(), 0.0);
    cache->argmax.assign(rows.size() * total, 0);
    cache->pooled.assign(rows.size() * total, 0.0);
    cache->mask.assign(rows.size() * total, 1.0);
  }

  std::vector<double> scores(rows.size());
  std::vector<double> embedded(batch.max_len * d);
  std::vector<double> feat(total);
  const double* dense_w = model.params.data() + model.dense_w_offset();
  double dense_b = model.params[model.dense_b_offset()];

  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    gather_embeddings(model, batch.row(rows[ri]), batch.max_len, embedded.data());

    std::size_t out_f = 0;
    for (std::size_t layer = 0; layer < cfg.kernel_sizes.size(); ++layer) {
      std::size_t k = cfg.kernel_sizes[layer];
      std::size_t window = k * d;
      std::size_t n_pos = batch.max_len - k + 1;
      const double* w = model.params.data() + model.conv_w_offset(layer);
      const double* b = model.params.data() + model.conv_b_offset(layer);
      for (std::size_t f = 0; f < nf; ++f, ++out_f) {
        const double* wf = w + f * window;
        double best = 0.0;  // ReLU floor: all-negative windows pool to zero
        std::size_t best_pos = 0;
        for (std::size_t p = 0; p < n_pos; ++p) {
          double z = kernels::dot(wf, embedded.data() + p * d, window) + b[f];
          if (z > best) {
            best = z;
            best_pos = p;
          }
        }
        feat[out_f] = best;
        if (cache) {
          cache->pooled[ri * total + out_f] = best;
          cache->argmax[ri * total + out_f] = best_pos;
        }
      }
    }

    if (train_mode && cfg.dropout > 0.0) {
      for (std::size_t j = 0; j < total; ++j) {
        double m = (rng && rng->bernoulli(keep)) ? 1.0 / keep : 0.0;
        feat[j] *= m;
        if (cache) cache->mask[ri * total + j] = m;
      }
    }

    double z = kernels::dot(dense_w, feat.data(), total) + dense_b;
    scores[ri] = sigmoid(z);
    if (cache) cache->scores[ri] = scores[ri];
  }
  return scores;
}

// dscore_dz holds dLoss/dz per row (z = pre-sigmoid logit); accumulates the
// full parameter gradient.
void backward_rows(const CnnModel& model, const PaddedBatch& batch,
                   const std::vector<std::size_t>& rows, const ForwardCache& cache,
                   const std::vector<double>& dz, std::vector<double>& grad) {
  const CnnConfig& cfg = model.cfg;
  std::size_t d = cfg.embed_dim, nf = cfg.filters_per_kernel;
  std::size_t total = model.total_filters();
  const double* dense_w = model.params.data() + model.dense_w_offset();

  std::vector<double> embedded(batch.max_len * d);
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    if (dz[ri] == 0.0) continue;
    const std::int32_t* ids = batch.row(rows[ri]);
    gather_embeddings(model, ids, batch.max_len, embedded.data());

    // dense head
    double g = dz[ri];
    grad[model.dense_b_offset()] += g;
    double* gw = grad.data() + model.dense_w_offset();
    for (std::size_t j = 0; j < total; ++j) {
      double dropped = cache.pooled[ri * total + j] * cache.mask[ri * total + j];
      gw[j] += g * dropped;
    }

    // through dropout into each pooled feature, then into its argmax window
    std::size_t out_f = 0;
    for (std::size_t layer = 0; layer < cfg.kernel_sizes.size(); ++layer) {
      std::size_t k = cfg.kernel_sizes[layer];
      std::size_t window = k * d;
      const double* w = model.params.data() + model.conv_w_offset(layer);
      double* gw_conv = grad.data() + model.conv_w_offset(layer);
      double* gb_conv = grad.data() + model.conv_b_offset(layer);
      for (std::size_t f = 0; f < nf; ++f, ++out_f) {
        double pooled = cache.pooled[ri * total + out_f];
        if (pooled <= 0.0) continue;  // inactive ReLU or all-negative windows
        double dfeat = g * dense_w[out_f] * cache.mask[ri * total + out_f];
        if (dfeat == 0.0) continue;
        std::size_t p = cache.argmax[ri * total + out_f];
        kernels::axpy(dfeat, embedded.data() + p * d, gw_conv + f * window, window);
        gb_conv[f] += dfeat;
        if (cfg.trainable_embeddings) {
          // scatter into embedding rows of the window, skipping padding
          const double* wf = w + f * window;
          for (std::size_t i = 0; i < k; ++i) {
            std::int32_t id = ids[p + i];
            if (id == 0) continue;
            kernels::axpy(dfeat, wf + i * d,
                          grad.data() + model.embed_offset() +
                              static_cast<std::size_t>(id) * d,
                          d);
          }
        }
      }
    }
  }
}

std::vector<double> loss_gradient(const std::vector<double>& scores,
                                  const std::vector<int>& labels, CnnLoss loss,
                                  const ClassWeightPair& weights) {
  std::vector<double> dz(scores.size(), 0.0);
  if (loss == CnnLoss::cross_entropy) {
    double den = 0.0;
    for (int y : labels) den += y == 1 ? weights.w1 : weights.w0;
    if (den <= 0.0) return dz;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      double w = labels[i] == 1 ? weights.w1 : weights.w0;
      dz[i] = w * (scores[i] - static_cast<double>(labels[i])) / den;
    }
    return dz;
  }
  std::size_t pos = 0, neg = 0;
  for (int y : labels) (y == 1 ? pos : neg) += 1;
  if (pos == 0 || neg == 0) return dz;
  double scale = 1.0 / (static_cast<double>(pos) * static_cast<double>(neg));
  std::vector<double> ds(scores.size(), 0.0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] == 1) continue;
      double h = 1.0 - (scores[i] - scores[j]);
      if (h <= 0.0) continue;
      ds[i] -= 2.0 * h * scale;
      ds[j] += 2.0 * h * scale;
    }
  }
  for (std::size_t i = 0; i < scores.size(); ++i)
    dz[i] = ds[i] * scores[i] * (1.0 - scores[i]);
  return dz;
}

double batch_loss(const std::vector<double>& scores, const std::vector<int>& labels,
                  CnnLoss loss, const ClassWeightPair& weights, bool* counted) {
  if (loss == CnnLoss::cross_entropy) {
    if (counted) *counted = true;
    return loss_cross_entropy(scores, labels, weights);
  }
  std::size_t pos = 0, neg = 0;
  for (int y : labels) (y == 1 ? pos : neg) += 1;
  if (counted) *counted = pos > 0 && neg > 0;
  return loss_auc_surrogate(scores, labels);
}

std::vector<std::size_t> trainable_indices(const CnnModel& model) {
  std::vector<std::size_t> idx;
  std::size_t embed_end = model.cfg.vocab_size * model.cfg.embed_dim;
  if (model.cfg.trainable_embeddings)
    for (std::size_t i = model.cfg.embed_dim; i < embed_end; ++i) idx.push_back(i);
  for (std::size_t i = embed_end; i < model.params.size(); ++i) idx.push_back(i);
  return idx;
}

}  // namespace

std::string to_string(EmbedInit v) {
  switch (v) {
    case EmbedInit::random: return "random";
    case EmbedInit::cbow: return "cbow";
    default: return "fasttext";
  }
}

std::string to_string(CnnLoss v) {
  return v == CnnLoss::cross_entropy ? "cross_entropy" : "auc_surrogate";
}

EmbedInit embed_init_from_string(const std::string& name) {
  if (name == "random") return EmbedInit::random;
  if (name == "cbow") return EmbedInit::cbow;
  if (name == "fasttext") return EmbedInit::fasttext;
  throw DataError("unknown embedding init: " + name);
}

CnnLoss loss_from_string(const std::string& name) {
  if (name == "cross_entropy" || name == "ce") return CnnLoss::cross_entropy;
  if (name == "auc_surrogate" || name == "auc") return CnnLoss::auc_surrogate;
  throw DataError("unknown loss: " + name);
}

void CnnConfig::validate() const {
  if (embed_dim < 1) throw DataError("embed_dim must be at least 1");
  if (kernel_sizes.empty()) throw DataError("at least one kernel size required");
  for (std::size_t k : kernel_sizes) {
    if (k < 1) throw DataError("kernel sizes must be at least 1");
    if (k > max_sequence_length)
      throw DataError("kernel size " + std::to_string(k) +
                      " exceeds max_sequence_length " +
                      std::to_string(max_sequence_length));
  }
  if (filters_per_kernel < 1) throw DataError("filters_per_kernel must be at least 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw DataError("dropout must lie in [0,1)");
  if (max_sequence_length < 1) throw DataError("max_sequence_length must be at least 1");
  if (vocab_size < 2) throw DataError("vocab_size must be at least 2 (padding + words)");
  if (batch < 1) throw DataError("batch must be at least 1");
  if (!(lr >= 0.0)) throw DataError("lr must be non-negative");
}

std::string cnn_config_json(const CnnConfig& cfg) {
  nlohmann::json j{{"embed_dim", cfg.embed_dim},
                   {"kernel_sizes", cfg.kernel_sizes},
                   {"filters_per_kernel", cfg.filters_per_kernel},
                   {"dropout", cfg.dropout},
                   {"max_sequence_length", cfg.max_sequence_length},
                   {"vocab_size", cfg.vocab_size},
                   {"embed_init", to_string(cfg.embed_init)},
                   {"trainable_embeddings", cfg.trainable_embeddings},
                   {"loss", to_string(cfg.loss)},
                   {"epochs", cfg.epochs},
                   {"batch", cfg.batch},
                   {"lr", cfg.lr},
                   {"seed", cfg.seed}};
  return j.dump();
}

CnnConfig cnn_config_from_json(const std::string& text) {
  CnnConfig cfg;
  try {
    auto j = nlohmann::json::parse(text);
    cfg.embed_dim = j.at("embed_dim").get<std::size_t>();
    cfg.kernel_sizes = j.at("kernel_sizes").get<std::vector<std::size_t>>();
    cfg.filters_per_kernel = j.at("filters_per_kernel").get<std::size_t>();
    cfg.dropout = j.at("dropout").get<double>();
    cfg.max_sequence_length = j.at("max_sequence_length").get<std::size_t>();
    cfg.vocab_size = j.at("vocab_size").get<std::size_t>();
    cfg.embed_init = embed_init_from_string(j.at("embed_init").get<std::string>());
    cfg.trainable_embeddings = j.at("trainable_embeddings").get<bool>();
    cfg.loss = loss_from_string(j.at("loss").get<std::string>());
    cfg.epochs = j.at("epochs").get<std::size_t>();
    cfg.batch = j.at("batch").get<std::size_t>();
    cfg.lr = j.at("lr").get<double>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed network config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

void PaddedBatch::validate(std::size_t vocab_size) const {
  if (token_ids.size() != rows * max_len)
    throw DataError("token id buffer does not match rows x max_len");
  if (labels.size() != rows) throw DataError("labels do not match batch rows");
  for (std::int32_t id : token_ids)
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_size)
      throw DataError("token id " + std::to_string(id) + " outside vocabulary");
  for (int y : labels)
    if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
}

TokenVocab build_token_vocab(const std::vector<std::vector<std::string>>& corpus,
                             std::size_t max_words) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& doc : corpus)
    for (const auto& tok : doc) ++counts[tok];
  std::vector<std::pair<std::string, std::uint64_t>> ranked(counts.begin(),
                                                            counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (max_words > 0 && ranked.size() > max_words) ranked.resize(max_words);

  TokenVocab vocab;
  vocab.id_to_word.push_back("");
  for (const auto& [word, count] : ranked) {
    vocab.word_to_id[word] = static_cast<std::int32_t>(vocab.id_to_word.size());
    vocab.id_to_word.push_back(word);
  }
  return vocab;
}

std::vector<std::int32_t> encode_tokens(const TokenVocab& vocab,
                                        const std::vector<std::string>& tokens,
                                        std::size_t max_len) {
  std::vector<std::int32_t> ids(max_len, 0);
  std::size_t n = 0;
  for (const auto& tok : tokens) {
    if (n >= max_len) break;
    auto it = vocab.word_to_id.find(tok);
    if (it == vocab.word_to_id.end()) continue;
    ids[n++] = it->second;
  }
  return ids;
}

PaddedBatch encode_batch(const TokenVocab& vocab,
                         const std::vector<std::vector<std::string>>& docs,
                         const std::vector<int>& labels, std::size_t max_len) {
  if (docs.size() != labels.size())
    throw DataError("document and label counts differ");
  PaddedBatch batch;
  batch.rows = docs.size();
  batch.max_len = max_len;
  batch.labels = labels;
  batch.token_ids.reserve(docs.size() * max_len);
  for (const auto& doc : docs) {
    auto ids = encode_tokens(vocab, doc, max_len);
    batch.token_ids.insert(batch.token_ids.end(), ids.begin(), ids.end());
  }
  return batch;
}

std::size_t CnnModel::conv_w_offset(std::size_t layer) const {
  std::size_t off = cfg.vocab_size * cfg.embed_dim;
  for (std::size_t l = 0; l < layer; ++l)
    off += cfg.filters_per_kernel * (cfg.kernel_sizes[l] * cfg.embed_dim + 1);
  return off;
}

std::size_t CnnModel::conv_b_offset(std::size_t layer) const {
  return conv_w_offset(layer) +
         cfg.filters_per_kernel * cfg.kernel_sizes[layer] * cfg.embed_dim;
}

std::size_t CnnModel::dense_w_offset() const {
  return conv_w_offset(cfg.kernel_sizes.size());
}

std::size_t CnnModel::dense_b_offset() const {
  return dense_w_offset() + total_filters();
}

CnnModel build_cnn(const CnnConfig& cfg) {
  cfg.validate();
  if (cfg.embed_init != EmbedInit::random)
    throw DataError("pretrained embedding init requires a vocabulary and table");
  CnnModel model;
  model.cfg = cfg;
  model.params.assign(cfg.vocab_size * cfg.embed_dim, 0.0);

  Rng rng(splitmix64(cfg.seed));
  double* embed = model.params.data();
  for (std::size_t r = 1; r < cfg.vocab_size; ++r)
    for (std::size_t j = 0; j < cfg.embed_dim; ++j)
      embed[r * cfg.embed_dim + j] = rng.uniform(-0.05, 0.05);

  // Biases share the weights' fan-in-scaled range: a zero bias would leave
  // all-padding windows sitting exactly on the ReLU kink.
  for (std::size_t k : cfg.kernel_sizes) {
    std::size_t fan_in = k * cfg.embed_dim;
    double limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < cfg.filters_per_kernel * (fan_in + 1); ++i)
      model.params.push_back(rng.uniform(-limit, limit));
  }
  double limit = 1.0 / std::sqrt(static_cast<double>(model.total_filters()));
  for (std::size_t j = 0; j < model.total_filters() + 1; ++j)
    model.params.push_back(rng.uniform(-limit, limit));
  return model;
}

CnnModel build_cnn(const CnnConfig& cfg, const TokenVocab& vocab,
                   const embeddings::EmbeddingTable& table) {
  cfg.validate();
  if (cfg.embed_init == EmbedInit::random)
    throw DataError("random init takes no embedding table");
  if (table.dim != cfg.embed_dim)
    throw DataError("embedding table dimension " + std::to_string(table.dim) +
                    " does not match embed_dim " + std::to_string(cfg.embed_dim));
  if (vocab.size() > cfg.vocab_size)
    throw DataError("token vocabulary exceeds vocab_size");

  CnnConfig random_cfg = cfg;
  random_cfg.embed_init = EmbedInit::random;
  CnnModel model = build_cnn(random_cfg);
  model.cfg = cfg;
  for (std::size_t id = 1; id < vocab.size(); ++id) {
    auto vec = embeddings::word_vector(table, vocab.id_to_word[id]);
    if (!vec) continue;
    std::copy(vec->begin(), vec->end(),
              model.params.begin() + static_cast<std::ptrdiff_t>(id * cfg.embed_dim));
  }
  return model;
}

std::vector<double> forward(const CnnModel& model, const PaddedBatch& batch,
                            bool train_mode, Rng* rng) {
  batch.validate(model.cfg.vocab_size);
  std::vector<std::size_t> rows(batch.rows);
  std::iota(rows.begin(), rows.end(), 0);
  return forward_rows(model, batch, rows, train_mode, rng, nullptr);
}

double loss_cross_entropy(const std::vector<double>& scores,
                          const std::vector<int>& labels,
                          const ClassWeightPair& weights) {
  if (scores.size() != labels.size())
    throw DataError("scores and labels differ in length");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    double s = std::clamp(scores[i], kProbFloor, 1.0 - kProbFloor);
    double w = labels[i] == 1 ? weights.w1 : weights.w0;
    num += w * -(labels[i] == 1 ? std::log(s) : std::log(1.0 - s));
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

double loss_auc_surrogate(const std::vector<double>& scores,
                          const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw DataError("scores and labels differ in length");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] == 1) continue;
      double h = std::max(0.0, 1.0 - (scores[i] - scores[j]));
      sum += h * h;
      ++pairs;
    }
  }
  return pairs > 0 ? sum / static_cast<double>(pairs) : 0.0;
}

CnnTrainResult train_cnn(CnnModel& model, const PaddedBatch& train,
                         const PaddedBatch& val, const ClassWeightPair& weights) {
  const CnnConfig& cfg = model.cfg;
  cfg.validate();
  train.validate(cfg.vocab_size);
  val.validate(cfg.vocab_size);
  if (train.rows == 0) throw DataError("empty training set");

  Rng rng(splitmix64(cfg.seed ^ 0x7EA1C0DEull));
  std::size_t n_params = model.params.size();
  std::vector<double> m(n_params, 0.0), v(n_params, 0.0), grad(n_params, 0.0);
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::size_t step = 0;

  CnnTrainResult result;
  std::vector<double> best_params = model.params;
  double best_auc = -1.0;

  std::vector<std::size_t> order(train.rows);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> val_rows(val.rows);
  std::iota(val_rows.begin(), val_rows.end(), 0);

  std::size_t epochs = cfg.resolved_epochs();
  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    ForwardCache cache;

    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      std::size_t end = std::min(order.size(), start + cfg.batch);
      std::vector<std::size_t> rows(order.begin() + start, order.begin() + end);
      std::vector<int> labels(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) labels[i] = train.labels[rows[i]];

      auto scores = forward_rows(model, train, rows, true, &rng, &cache);
      bool counted = false;
      double loss = batch_loss(scores, labels, cfg.loss, weights, &counted);
      if (!std::isfinite(loss))
        throw SolverError("non-finite training loss at epoch " +
                          std::to_string(epoch) + ", batch starting at row " +
                          std::to_string(start));
      if (counted) {
        loss_sum += loss * static_cast<double>(rows.size());
        loss_count += rows.size();
      }

      auto dz = loss_gradient(scores, labels, cfg.loss, weights);
      std::fill(grad.begin(), grad.end(), 0.0);
      backward_rows(model, train, rows, cache, dz, grad);

      ++step;
      double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (std::size_t i = 0; i < n_params; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        model.params[i] -= cfg.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
      }
    }

    auto val_scores = forward_rows(model, val, val_rows, false, nullptr, nullptr);
    double val_auc = eval::roc_auc(val.labels, val_scores).second;
    double train_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count)
                                       : 0.0;
    result.history.push_back({epoch, train_loss, val_auc});
    if (val_auc > best_auc) {
      best_auc = val_auc;
      best_params = model.params;
      result.best_epoch = epoch;
    }
  }

  model.params = std::move(best_params);
  result.best_val_auc = best_auc;
  return result;
}

void save_history_csv(const std::string& path,
                      const std::vector<CnnEpochStats>& history) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write history: " + path);
  out << "epoch,train_loss,val_auc\n";
  char buf[96];
  for (const auto& row : history) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", row.epoch, row.train_loss,
                  row.val_auc);
    out << buf;
  }
}

double gradient_check(const CnnModel& model, const PaddedBatch& batch, CnnLoss loss,
                      const ClassWeightPair& weights) {
  if (model.cfg.dropout != 0.0)
    throw DataError("gradient check requires dropout 0");
  batch.validate(model.cfg.vocab_size);
  std::vector<std::size_t> rows(batch.rows);
  std::iota(rows.begin(), rows.end(), 0);

  ForwardCache cache;
  auto scores = forward_rows(model, batch, rows, false, nullptr, &cache);
  auto dz = loss_gradient(scores, batch.labels, loss, weights);
  std::vector<double> analytic(model.params.size(), 0.0);
  backward_rows(model, batch, rows, cache, dz, analytic);

  CnnModel probe = model;
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t i : trainable_indices(model)) {
    double saved = probe.params[i];
    probe.params[i] = saved + h;
    auto up = forward_rows(probe, batch, rows, false, nullptr, nullptr);
    double loss_up = batch_loss(up, batch.labels, loss, weights, nullptr);
    probe.params[i] = saved - h;
    auto down = forward_rows(probe, batch, rows, false, nullptr, nullptr);
    double loss_down = batch_loss(down, batch.labels, loss, weights, nullptr);
    probe.params[i] = saved;

    double numeric = (loss_up - loss_down) / (2.0 * h);
    double denom = std::max(1e-5, std::abs(analytic[i]) + std::abs(numeric));
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

void save_cnn(const std::string& path, const CnnModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out << "TQCNN1\n" << cnn_config_json(model.cfg) << '\n';
  std::uint64_t count = model.params.size();
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  std::vector<float> blob(model.params.size());
  for (std::size_t i = 0; i < blob.size(); ++i)
    blob[i] = static_cast<float>(model.params[i]);
  out.write(reinterpret_cast<const char*>(blob.data()),
            static_cast<std::streamsize>(blob.size() * sizeof(float)));
  if (!out) throw DataError("short write while saving checkpoint: " + path);
}

CnnModel load_cnn(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read checkpoint: " + path);
  std::string magic, config_line;
  if (!std::getline(in, magic) || magic != "TQCNN1")
    throw DataError("not a network checkpoint: " + path);
  if (!std::getline(in, config_line))
    throw DataError("checkpoint missing config header: " + path);

  CnnModel model;
  model.cfg = cnn_config_from_json(config_line);
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!in) throw DataError("checkpoint missing parameter count: " + path);

  std::size_t expected = model.cfg.vocab_size * model.cfg.embed_dim + 1 +
                         model.total_filters();
  for (std::size_t k : model.cfg.kernel_sizes)
    expected += model.cfg.filters_per_kernel * (k * model.cfg.embed_dim + 1);
  if (count != expected)
    throw DataError("checkpoint parameter count does not match its config");

  std::vector<float> blob(count);
  in.read(reinterpret_cast<char*>(blob.data()),
          static_cast<std::streamsize>(blob.size() * sizeof(float)));
  if (static_cast<std::size_t>(in.gcount()) != blob.size() * sizeof(float))
    throw DataError("truncated checkpoint: " + path);
  model.params.assign(blob.begin(), blob.end());
  return model;
}

}  // namespace tahqiq::neural
