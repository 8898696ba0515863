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
#include <utility>
#include <vector>

#include "tahqiq/arabic.hpp"

namespace tahqiq::corpus {

struct TweetRecord {
  std::string id;
  std::string text;
  std::optional<int> label;
  std::optional<std::string> timestamp;
};

struct LabeledDataset {
  std::vector<TweetRecord> records;
  std::size_t positive_count = 0;
  std::size_t negative_count = 0;

  std::size_t size() const { return records.size(); }
};

enum class Format { jsonl, tsv };

// Infers jsonl/tsv from the file extension; ".tsv" and ".txt" map to tsv,
// everything else to jsonl.
Format format_from_path(const std::string& path);

// Loads records whose labels may be absent (the preprocess path accepts
// unlabeled corpora). Throws DataError naming the offending line.
std::vector<TweetRecord> load_records(const std::string& path, Format format);

// Requires every record to carry a 0/1 label.
LabeledDataset load_dataset(const std::string& path, Format format);
LabeledDataset to_labeled(std::vector<TweetRecord> records);

struct TokenizedRecord {
  std::string id;
  std::vector<std::string> tokens;
  std::optional<int> label;
};

// Tokenized corpus JSONL: one {"id","tokens",["label"]} object per line. A
// leading {"_meta":...} line carries the producing run's config and is
// skipped on load.
std::vector<TokenizedRecord> load_tokens(const std::string& path);
void save_tokens(const std::string& path, const std::vector<TokenizedRecord>& records,
                 const std::string& meta_json);

struct DatasetStats {
  std::size_t n_records = 0;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  double positive_ratio = 0.0;
  std::size_t unique_tokens = 0;
};

DatasetStats dataset_stats(const LabeledDataset& ds, const arabic::PreprocessConfig& cfg);

struct SplitSpec {
  std::vector<double> fractions;
  std::uint64_t seed = 0;
  bool stratified = true;
};

// Partitions row indices into |fractions| disjoint parts covering everything.
// Sizes are floor(n*f) with the remainder going to the first part, applied
// per class when stratified. Each part is returned sorted.
std::vector<std::vector<std::size_t>> split_indices(const std::vector<int>& labels,
                                                    const SplitSpec& spec);
std::vector<LabeledDataset> split(const LabeledDataset& ds, const SplitSpec& spec);

// k (train, validation) index pairs; every row appears in exactly one
// validation fold. Stratified mode deals each class round-robin and requires
// at least k rows per class. Index lists are sorted.
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfold_indices(
    const std::vector<int>& labels, std::size_t k, std::uint64_t seed, bool stratified);

}  // namespace tahqiq::corpus
