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
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace tahqiq::features {

enum class NgramMode { unigram, bi_tri };
enum class LogBase { natural, base10 };

struct TfidfConfig {
  NgramMode ngram_mode = NgramMode::unigram;
  std::size_t max_features = 5000;
  LogBase log_base = LogBase::natural;
  bool l2_normalize = false;
};

struct Vocabulary {
  std::vector<std::string> terms;
  std::unordered_map<std::string, std::uint32_t> index;
  std::vector<std::size_t> df;
  std::size_t n_docs = 0;

  std::size_t size() const { return terms.size(); }
};

struct SparseEntry {
  std::uint32_t col = 0;
  double weight = 0.0;

  bool operator==(const SparseEntry&) const = default;
};

struct SparseVector {
  std::vector<SparseEntry> entries;  // strictly increasing column ids, weights > 0
  std::size_t dim = 0;
};

// unigram: tokens as-is. bi_tri: all contiguous bigrams then all trigrams,
// space-joined, no unigrams.
std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens, NgramMode mode);

// Keeps the max_features terms with the highest corpus-wide term frequency,
// ties broken lexicographically; columns are assigned in that selection
// order.
Vocabulary fit_vocabulary(const std::vector<std::vector<std::string>>& corpus,
                          const TfidfConfig& cfg);

// weight = TF * log(N/DF). A term present in every document gets weight 0 and
// is omitted; unknown terms are ignored.
SparseVector tfidf_vector(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                          const TfidfConfig& cfg);

std::vector<SparseVector> transform_corpus(const std::vector<std::vector<std::string>>& corpus,
                                           const Vocabulary& vocab, const TfidfConfig& cfg);

std::string to_string(NgramMode mode);
std::string to_string(LogBase base);
NgramMode ngram_mode_from_string(const std::string& s);
LogBase log_base_from_string(const std::string& s);
std::string config_json(const TfidfConfig& cfg);
TfidfConfig config_from_json(const std::string& s);

// TSV persistence: a "#vocab<TAB>{json}" header line carrying n_docs and the
// config, then term<TAB>column<TAB>df rows.
void save_vocabulary(const std::string& path, const Vocabulary& vocab, const TfidfConfig& cfg);
std::pair<Vocabulary, TfidfConfig> load_vocabulary(const std::string& path);

// Sparse vectors, one per line: id<SP>label<SP>col:weight ... with label -1
// when absent. A leading "#"-comment line carries run metadata.
struct VectorRecord {
  std::string id;
  std::optional<int> label;
  SparseVector vector;
};

void save_vectors(const std::string& path, const std::vector<VectorRecord>& records,
                  const std::string& meta_json);
// dim_hint, when nonzero, fixes every loaded vector's dimension (the file
// itself does not store trailing zero columns).
std::vector<VectorRecord> load_vectors(const std::string& path, std::size_t dim_hint = 0);

}  // namespace tahqiq::features
