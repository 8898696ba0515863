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
#include <string>
#include <vector>

#include "tahqiq/embeddings.hpp"
#include "tahqiq/rng.hpp"

// 1-D convolutional text classifier: embedding lookup, parallel valid
// convolutions (one layer per kernel size), ReLU, global max-pool,
// concatenation, inverted dropout, dense sigmoid head. Everything runs in
// double precision; checkpoints store float32.

namespace tahqiq::neural {

enum class EmbedInit { random, cbow, fasttext };
enum class CnnLoss { cross_entropy, auc_surrogate };

std::string to_string(EmbedInit v);
std::string to_string(CnnLoss v);
EmbedInit embed_init_from_string(const std::string& name);
CnnLoss loss_from_string(const std::string& name);

struct CnnConfig {
  std::size_t embed_dim = 200;
  std::vector<std::size_t> kernel_sizes = {4, 5};
  std::size_t filters_per_kernel = 100;
  double dropout = 0.5;
  std::size_t max_sequence_length = 50;
  std::size_t vocab_size = 0;  // includes the padding id 0
  EmbedInit embed_init = EmbedInit::random;
  bool trainable_embeddings = true;
  CnnLoss loss = CnnLoss::cross_entropy;
  std::size_t epochs = 0;  // 0 = default for the loss (500 ce, 600 surrogate)
  std::size_t batch = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;

  std::size_t resolved_epochs() const {
    if (epochs > 0) return epochs;
    return loss == CnnLoss::cross_entropy ? 500 : 600;
  }
  void validate() const;  // throws DataError
};

std::string cnn_config_json(const CnnConfig& cfg);
CnnConfig cnn_config_from_json(const std::string& text);

// Token ids for the whole split, row-major rows x max_len, 0 = padding.
struct PaddedBatch {
  std::vector<std::int32_t> token_ids;
  std::vector<int> labels;
  std::size_t rows = 0;
  std::size_t max_len = 0;

  const std::int32_t* row(std::size_t r) const { return token_ids.data() + r * max_len; }
  void validate(std::size_t vocab_size) const;
};

// Word ids ranked by corpus frequency (ties lexicographic); id 0 is the
// padding slot and never assigned to a word.
struct TokenVocab {
  std::vector<std::string> id_to_word;  // [0] = ""
  std::map<std::string, std::int32_t> word_to_id;

  std::size_t size() const { return id_to_word.size(); }
};

TokenVocab build_token_vocab(const std::vector<std::vector<std::string>>& corpus,
                             std::size_t max_words);

// Unknown tokens are dropped; the sequence is right-truncated and
// right-padded with 0.
std::vector<std::int32_t> encode_tokens(const TokenVocab& vocab,
                                        const std::vector<std::string>& tokens,
                                        std::size_t max_len);
PaddedBatch encode_batch(const TokenVocab& vocab,
                         const std::vector<std::vector<std::string>>& docs,
                         const std::vector<int>& labels, std::size_t max_len);

struct CnnModel {
  CnnConfig cfg;
  // Flat parameter vector: embedding (vocab x D), then per kernel size the
  // filter bank (filters x (k*D)) and its biases, then dense weights and bias.
  std::vector<double> params;

  std::size_t embed_offset() const { return 0; }
  std::size_t conv_w_offset(std::size_t layer) const;
  std::size_t conv_b_offset(std::size_t layer) const;
  std::size_t dense_w_offset() const;
  std::size_t dense_b_offset() const;
  std::size_t total_filters() const {
    return cfg.kernel_sizes.size() * cfg.filters_per_kernel;
  }
  std::size_t param_count() const { return params.size(); }
};

// Random init is fan-in-scaled uniform for conv/dense weights and biases and
// U[-0.05, 0.05] for embedding rows; pretrained init copies resolvable words'
// vectors. Row 0 is the padding row: zero, and never updated during training.
CnnModel build_cnn(const CnnConfig& cfg);
CnnModel build_cnn(const CnnConfig& cfg, const TokenVocab& vocab,
                   const embeddings::EmbeddingTable& table);

// train_mode draws inverted-dropout masks from rng; eval mode ignores rng and
// is deterministic.
std::vector<double> forward(const CnnModel& model, const PaddedBatch& batch,
                            bool train_mode, Rng* rng = nullptr);

struct ClassWeightPair {
  double w0 = 1.0;
  double w1 = 1.0;
};

double loss_cross_entropy(const std::vector<double>& scores,
                          const std::vector<int>& labels,
                          const ClassWeightPair& weights = {});
// Mean squared hinge over positive/negative pairs; 0 when either class is
// missing from the batch.
double loss_auc_surrogate(const std::vector<double>& scores,
                          const std::vector<int>& labels);

struct CnnEpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_auc = 0.0;
};

struct CnnTrainResult {
  std::vector<CnnEpochStats> history;
  std::size_t best_epoch = 0;  // 1-based epoch whose weights were kept
  double best_val_auc = 0.0;
};

// Adaptive-moment optimizer (beta1 0.9, beta2 0.999, eps 1e-8); shuffles each
// epoch; keeps the weights from the best-validation-AUC epoch.
CnnTrainResult train_cnn(CnnModel& model, const PaddedBatch& train,
                         const PaddedBatch& val, const ClassWeightPair& weights = {});

void save_history_csv(const std::string& path, const std::vector<CnnEpochStats>& history);

// Central finite differences (h=1e-5) over every trainable parameter against
// the analytic gradient; returns the max relative error. Dropout must be 0.
double gradient_check(const CnnModel& model, const PaddedBatch& batch, CnnLoss loss,
                      const ClassWeightPair& weights = {});

// Checkpoint: magic line, config JSON line, then a float32 parameter blob.
void save_cnn(const std::string& path, const CnnModel& model);
CnnModel load_cnn(const std::string& path);

}  // namespace tahqiq::neural
