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

#include "tahqiq/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "json.hpp"
#include "tahqiq/errors.hpp"
#include "tahqiq/rng.hpp"

namespace tahqiq::corpus {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void line_error(const std::string& path, std::size_t line_no,
                             const std::string& what) {
  throw DataError(path + ":" + std::to_string(line_no) + ": " + what);
}

std::optional<int> parse_label(const json& v, const std::string& path, std::size_t line_no) {
  if (v.is_null()) return std::nullopt;
  long value = -1;
  if (v.is_number_integer()) {
    value = v.get<long>();
  } else if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.empty()) return std::nullopt;
    if (s == "0") value = 0;
    if (s == "1") value = 1;
  } else if (v.is_boolean()) {
    value = v.get<bool>() ? 1 : 0;
  }
  if (value != 0 && value != 1) line_error(path, line_no, "label must be 0 or 1");
  return static_cast<int>(value);
}

TweetRecord parse_jsonl_line(const std::string& line, const std::string& path,
                             std::size_t line_no) {
  json obj = json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) line_error(path, line_no, "malformed JSON record");
  TweetRecord rec;
  if (!obj.contains("id")) line_error(path, line_no, "missing \"id\"");
  const json& id = obj["id"];
  rec.id = id.is_string() ? id.get<std::string>() : id.dump();
  if (!obj.contains("text") || !obj["text"].is_string())
    line_error(path, line_no, "missing or non-string \"text\"");
  rec.text = obj["text"].get<std::string>();
  if (trim(rec.text).empty()) line_error(path, line_no, "empty text");
  if (obj.contains("label")) rec.label = parse_label(obj["label"], path, line_no);
  if (obj.contains("timestamp") && obj["timestamp"].is_string())
    rec.timestamp = obj["timestamp"].get<std::string>();
  return rec;
}

TweetRecord parse_tsv_line(const std::string& line, const std::string& path,
                           std::size_t line_no) {
  std::size_t t1 = line.find('\t');
  std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
  if (t2 == std::string::npos) line_error(path, line_no, "expected id<TAB>label<TAB>text");
  TweetRecord rec;
  rec.id = line.substr(0, t1);
  const std::string label = trim(line.substr(t1 + 1, t2 - t1 - 1));
  rec.text = line.substr(t2 + 1);
  if (rec.id.empty()) line_error(path, line_no, "empty id");
  if (trim(rec.text).empty()) line_error(path, line_no, "empty text");
  if (!label.empty()) {
    if (label != "0" && label != "1") line_error(path, line_no, "label must be 0 or 1");
    rec.label = label == "1" ? 1 : 0;
  }
  return rec;
}

}  // namespace

Format format_from_path(const std::string& path) {
  auto ends_with = [&](const char* suffix) {
    const std::string s(suffix);
    return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with(".tsv") || ends_with(".txt")) return Format::tsv;
  return Format::jsonl;
}

std::vector<TweetRecord> load_records(const std::string& path, Format format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus: " + path);
  std::vector<TweetRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    records.push_back(format == Format::jsonl ? parse_jsonl_line(line, path, line_no)
                                              : parse_tsv_line(line, path, line_no));
  }
  if (records.empty()) throw DataError(path + ": no records");
  return records;
}

LabeledDataset to_labeled(std::vector<TweetRecord> records) {
  LabeledDataset ds;
  ds.records = std::move(records);
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto& rec = ds.records[i];
    if (!rec.label)
      throw DataError("record \"" + rec.id + "\" (row " + std::to_string(i + 1) +
                      ") has no label");
    if (*rec.label == 1)
      ++ds.positive_count;
    else
      ++ds.negative_count;
  }
  return ds;
}

LabeledDataset load_dataset(const std::string& path, Format format) {
  return to_labeled(load_records(path, format));
}

std::vector<TokenizedRecord> load_tokens(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open tokens file: " + path);
  std::vector<TokenizedRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
      line_error(path, line_no, "malformed JSON record");
    if (obj.contains("_meta")) continue;
    TokenizedRecord rec;
    if (!obj.contains("id")) line_error(path, line_no, "missing \"id\"");
    rec.id = obj["id"].is_string() ? obj["id"].get<std::string>() : obj["id"].dump();
    if (!obj.contains("tokens") || !obj["tokens"].is_array())
      line_error(path, line_no, "missing or non-array \"tokens\"");
    for (const auto& t : obj["tokens"]) {
      if (!t.is_string()) line_error(path, line_no, "non-string token");
      rec.tokens.push_back(t.get<std::string>());
    }
    if (obj.contains("label")) rec.label = parse_label(obj["label"], path, line_no);
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw DataError(path + ": no records");
  return records;
}

void save_tokens(const std::string& path, const std::vector<TokenizedRecord>& records,
                 const std::string& meta_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write tokens file: " + path);
  if (!meta_json.empty()) {
    json meta_line;
    meta_line["_meta"] = json::parse(meta_json);
    out << meta_line.dump() << "\n";
  }
  for (const auto& rec : records) {
    json obj;
    obj["id"] = rec.id;
    obj["tokens"] = rec.tokens;
    if (rec.label) obj["label"] = *rec.label;
    out << obj.dump() << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

DatasetStats dataset_stats(const LabeledDataset& ds, const arabic::PreprocessConfig& cfg) {
  if (ds.records.empty()) throw DataError("dataset_stats: empty dataset");
  DatasetStats st;
  st.n_records = ds.records.size();
  st.n_positive = ds.positive_count;
  st.n_negative = ds.negative_count;
  st.positive_ratio = static_cast<double>(ds.positive_count) / static_cast<double>(st.n_records);
  std::unordered_set<std::string> uniq;
  for (const auto& rec : ds.records) {
    for (auto& tok : arabic::preprocess(rec.text, cfg)) uniq.insert(std::move(tok));
  }
  st.unique_tokens = uniq.size();
  return st;
}

namespace {

void validate_fractions(const std::vector<double>& fractions) {
  if (fractions.empty()) throw DataError("split: no fractions given");
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0) || f > 1.0) throw DataError("split: fractions must lie in (0,1]");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DataError("split: fractions must sum to 1");
}

// floor(n*f) sizes with the remainder added to part 0.
std::vector<std::size_t> part_sizes(std::size_t n, const std::vector<double>& fractions) {
  std::vector<std::size_t> sizes(fractions.size());
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < fractions.size(); ++j) {
    sizes[j] = static_cast<std::size_t>(std::floor(static_cast<double>(n) * fractions[j]));
    assigned += sizes[j];
  }
  sizes[0] += n - assigned;
  return sizes;
}

void deal_chunks(const std::vector<std::size_t>& shuffled, const std::vector<std::size_t>& sizes,
                 std::vector<std::vector<std::size_t>>& parts) {
  std::size_t pos = 0;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    for (std::size_t k = 0; k < sizes[j]; ++k) parts[j].push_back(shuffled[pos++]);
  }
}

}  // namespace

std::vector<std::vector<std::size_t>> split_indices(const std::vector<int>& labels,
                                                    const SplitSpec& spec) {
  validate_fractions(spec.fractions);
  if (labels.empty()) throw DataError("split: empty dataset");
  std::vector<std::vector<std::size_t>> parts(spec.fractions.size());
  Rng rng(splitmix64(spec.seed));
  if (spec.stratified) {
    for (int cls : {1, 0}) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == cls) idx.push_back(i);
      if (idx.empty()) throw DataError("split: stratified split needs both classes");
      auto sizes = part_sizes(idx.size(), spec.fractions);
      for (std::size_t s : sizes) {
        if (s == 0)
          throw DataError("split: class with " + std::to_string(idx.size()) +
                          " records is too small for the stratified fractions");
      }
      rng.shuffle(idx);
      deal_chunks(idx, sizes, parts);
    }
  } else {
    std::vector<std::size_t> idx(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) idx[i] = i;
    rng.shuffle(idx);
    deal_chunks(idx, part_sizes(idx.size(), spec.fractions), parts);
  }
  for (auto& p : parts) std::sort(p.begin(), p.end());
  return parts;
}

std::vector<LabeledDataset> split(const LabeledDataset& ds, const SplitSpec& spec) {
  std::vector<int> labels(ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i) labels[i] = *ds.records[i].label;
  auto parts = split_indices(labels, spec);
  std::vector<LabeledDataset> out;
  out.reserve(parts.size());
  for (const auto& part : parts) {
    LabeledDataset sub;
    sub.records.reserve(part.size());
    for (std::size_t i : part) {
      sub.records.push_back(ds.records[i]);
      if (labels[i] == 1)
        ++sub.positive_count;
      else
        ++sub.negative_count;
    }
    out.push_back(std::move(sub));
  }
  return out;
}

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> kfold_indices(
    const std::vector<int>& labels, std::size_t k, std::uint64_t seed, bool stratified) {
  if (k < 2) throw DataError("kfold: k must be at least 2");
  if (k > labels.size()) throw DataError("kfold: k exceeds the number of records");
  std::vector<std::vector<std::size_t>> folds(k);
  Rng rng(splitmix64(seed));
  if (stratified) {
    for (int cls : {1, 0}) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == cls) idx.push_back(i);
      if (idx.size() < k)
        throw DataError("kfold: class with " + std::to_string(idx.size()) +
                        " records cannot fill " + std::to_string(k) + " stratified folds");
      rng.shuffle(idx);
      for (std::size_t i = 0; i < idx.size(); ++i) folds[i % k].push_back(idx[i]);
    }
  } else {
    std::vector<std::size_t> idx(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) idx[i] = i;
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i) folds[i % k].push_back(idx[i]);
  }
  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> out(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(folds[f].begin(), folds[f].end());
    out[f].second = folds[f];
    for (std::size_t g = 0; g < k; ++g) {
      if (g == f) continue;
      out[f].first.insert(out[f].first.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(out[f].first.begin(), out[f].first.end());
  }
  return out;
}

}  // namespace tahqiq::corpus
