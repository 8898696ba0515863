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
#include <optional>
#include <string>
#include <utility>
#include <vector>

// Continuous-bag-of-words embeddings with negative sampling, in two flavors:
// plain word vectors and subword-bucket composition where a word's input
// vector is its own row plus the rows of its character n-grams. Tweet
// vectors are plain averages of the available word vectors.

namespace tahqiq::embeddings {

enum class EmbedMode { cbow, fasttext };

std::string to_string(EmbedMode mode);
EmbedMode mode_from_string(const std::string& name);

struct EmbedTrainConfig {
  std::size_t dim = 200;
  std::size_t window = 3;
  std::size_t negatives = 10;
  std::size_t min_count = 5;
  std::size_t epochs = 5;
  std::size_t batch = 50;  // targets accumulated per parameter update
  EmbedMode mode = EmbedMode::cbow;
  std::size_t subword_min = 3;
  std::size_t subword_max = 6;
  std::size_t buckets = 2'000'000;
  double learning_rate = 0.025;
  double min_learning_rate = 1e-4;
  std::size_t workers = 1;  // >1 trades determinism for speed
  std::uint64_t seed = 0;

  void validate() const;  // throws DataError
};

std::string embed_config_json(const EmbedTrainConfig& cfg);
EmbedTrainConfig embed_config_from_json(const std::string& text);

struct EmbedVocab {
  std::vector<std::string> words;  // row id -> word, lexicographic
  std::map<std::string, std::size_t> word_to_row;
  std::vector<std::uint64_t> counts;
  std::vector<double> noise;  // sampling probability per row, sums to 1
};

struct EmbeddingTable {
  EmbedMode mode = EmbedMode::cbow;
  std::size_t dim = 0;
  std::size_t buckets = 0;  // nonzero only in fasttext mode
  std::size_t subword_min = 3;
  std::size_t subword_max = 6;
  std::vector<std::string> words;
  std::map<std::string, std::size_t> vocab;
  // Row-major |V| x dim. In fasttext mode rows hold the composed vector
  // (word row plus subword rows) frozen at the end of training.
  std::vector<double> input_vectors;
  std::vector<double> bucket_vectors;  // row-major buckets x dim

  std::size_t size() const { return words.size(); }
  const double* row(std::size_t r) const { return input_vectors.data() + r * dim; }
  const double* bucket_row(std::size_t b) const {
    return bucket_vectors.data() + b * dim;
  }
};

struct TweetVector {
  std::vector<double> values;
  std::size_t n_words = 0;  // tokens that contributed a vector
};

struct EmbedTrainStats {
  double initial_loss = 0.0;
  std::vector<double> epoch_loss;  // held-out loss after each epoch
  std::size_t windows_per_epoch = 0;
};

using TokenCorpus = std::vector<std::vector<std::string>>;

EmbedVocab build_embed_vocab(const TokenCorpus& corpus, const EmbedTrainConfig& cfg);

// Dispatches on cfg.mode; stats, when given, receives the held-out
// negative-sampling loss at initialization and after each epoch.
EmbeddingTable train_embeddings(const TokenCorpus& corpus, const EmbedTrainConfig& cfg,
                                EmbedTrainStats* stats = nullptr);
EmbeddingTable train_cbow(const TokenCorpus& corpus, const EmbedTrainConfig& cfg,
                          EmbedTrainStats* stats = nullptr);
EmbeddingTable train_fasttext(const TokenCorpus& corpus, const EmbedTrainConfig& cfg,
                              EmbedTrainStats* stats = nullptr);

// In-vocab -> stored row. Out of vocab: subword-mode words compose from
// bucket rows; closed-vocab tables (and words yielding no n-grams) get none.
std::optional<std::vector<double>> word_vector(const EmbeddingTable& table,
                                               const std::string& word);

TweetVector tweet_vector(const EmbeddingTable& table,
                         const std::vector<std::string>& tokens);

// Text header "|V| D", one "word v1 .. vD" row per word (float32 precision);
// subword tables append a binary bucket section introduced by a magic line.
void save_table(const std::string& path, const EmbeddingTable& table);
EmbeddingTable load_table(const std::string& path);

// Cosine against every other vocab word, descending, ties lexicographic.
std::vector<std::pair<std::string, double>> nearest_neighbors(
    const EmbeddingTable& table, const std::string& word, std::size_t k);

// Character n-grams of the boundary-wrapped word, shortest first, then by
// position. Duplicates are kept; composition counts them once per occurrence.
std::vector<std::string> subword_ngrams(const std::string& word, std::size_t n_min,
                                        std::size_t n_max);

std::uint64_t fnv1a64(std::string_view bytes);

inline std::size_t subword_bucket(std::string_view ngram, std::size_t buckets) {
  return static_cast<std::size_t>(fnv1a64(ngram) % buckets);
}

}  // namespace tahqiq::embeddings
