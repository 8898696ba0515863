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

#include "tahqiq/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "tahqiq/errors.hpp"

namespace tahqiq::features {

using nlohmann::json;

std::vector<std::string> extract_ngrams(const std::vector<std::string>& tokens, NgramMode mode) {
  if (mode == NgramMode::unigram) return tokens;
  std::vector<std::string> out;
  for (std::size_t n : {std::size_t{2}, std::size_t{3}}) {
    if (tokens.size() < n) continue;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (std::size_t j = 1; j < n; ++j) {
        gram.push_back(' ');
        gram += tokens[i + j];
      }
      out.push_back(std::move(gram));
    }
  }
  return out;
}

Vocabulary fit_vocabulary(const std::vector<std::vector<std::string>>& corpus,
                          const TfidfConfig& cfg) {
  if (corpus.empty()) throw DataError("fit_vocabulary: empty corpus");
  if (cfg.max_features < 1) throw DataError("fit_vocabulary: max_features must be >= 1");
  // std::map keeps terms lexicographically ordered, which settles frequency
  // ties without a second key.
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // term -> (tf, df)
  std::vector<std::string> seen;
  for (const auto& doc : corpus) {
    seen.clear();
    for (const auto& term : extract_ngrams(doc, cfg.ngram_mode)) {
      auto& entry = counts[term];
      if (entry.first == 0 || std::find(seen.begin(), seen.end(), term) == seen.end()) {
        ++entry.second;
        seen.push_back(term);
      }
      ++entry.first;
    }
  }
  std::vector<const std::pair<const std::string, std::pair<std::size_t, std::size_t>>*> order;
  order.reserve(counts.size());
  for (const auto& kv : counts) order.push_back(&kv);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto* a, const auto* b) { return a->second.first > b->second.first; });
  Vocabulary vocab;
  vocab.n_docs = corpus.size();
  const std::size_t keep = std::min(cfg.max_features, order.size());
  vocab.terms.reserve(keep);
  vocab.df.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    vocab.index.emplace(order[i]->first, static_cast<std::uint32_t>(i));
    vocab.terms.push_back(order[i]->first);
    vocab.df.push_back(order[i]->second.second);
  }
  return vocab;
}

SparseVector tfidf_vector(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                          const TfidfConfig& cfg) {
  SparseVector out;
  out.dim = vocab.size();
  std::unordered_map<std::uint32_t, std::size_t> tf;
  for (const auto& term : extract_ngrams(tokens, cfg.ngram_mode)) {
    auto it = vocab.index.find(term);
    if (it != vocab.index.end()) ++tf[it->second];
  }
  out.entries.reserve(tf.size());
  const double n = static_cast<double>(vocab.n_docs);
  for (const auto& [col, count] : tf) {
    const double ratio = n / static_cast<double>(vocab.df[col]);
    const double idf = cfg.log_base == LogBase::natural ? std::log(ratio) : std::log10(ratio);
    const double w = static_cast<double>(count) * idf;
    if (w > 0.0) out.entries.push_back({col, w});
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.col < b.col; });
  if (cfg.l2_normalize && !out.entries.empty()) {
    double sq = 0.0;
    for (const auto& e : out.entries) sq += e.weight * e.weight;
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& e : out.entries) e.weight *= inv;
  }
  return out;
}

std::vector<SparseVector> transform_corpus(const std::vector<std::vector<std::string>>& corpus,
                                           const Vocabulary& vocab, const TfidfConfig& cfg) {
  std::vector<SparseVector> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus) out.push_back(tfidf_vector(doc, vocab, cfg));
  return out;
}

std::string to_string(NgramMode mode) {
  return mode == NgramMode::unigram ? "unigram" : "bi_tri";
}

std::string to_string(LogBase base) { return base == LogBase::natural ? "natural" : "base10"; }

NgramMode ngram_mode_from_string(const std::string& s) {
  if (s == "unigram") return NgramMode::unigram;
  if (s == "bi_tri") return NgramMode::bi_tri;
  throw DataError("unknown ngram mode: " + s);
}

LogBase log_base_from_string(const std::string& s) {
  if (s == "natural") return LogBase::natural;
  if (s == "base10") return LogBase::base10;
  throw DataError("unknown log base: " + s);
}

std::string config_json(const TfidfConfig& cfg) {
  json j;
  j["ngram_mode"] = to_string(cfg.ngram_mode);
  j["max_features"] = cfg.max_features;
  j["log_base"] = to_string(cfg.log_base);
  j["l2_normalize"] = cfg.l2_normalize;
  return j.dump();
}

TfidfConfig config_from_json(const std::string& s) {
  json j = json::parse(s, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("malformed tfidf config JSON");
  TfidfConfig cfg;
  if (j.contains("ngram_mode")) cfg.ngram_mode = ngram_mode_from_string(j["ngram_mode"]);
  if (j.contains("max_features")) cfg.max_features = j["max_features"].get<std::size_t>();
  if (j.contains("log_base")) cfg.log_base = log_base_from_string(j["log_base"]);
  if (j.contains("l2_normalize")) cfg.l2_normalize = j["l2_normalize"].get<bool>();
  return cfg;
}

void save_vocabulary(const std::string& path, const Vocabulary& vocab, const TfidfConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary: " + path);
  json header = json::parse(config_json(cfg));
  header["n_docs"] = vocab.n_docs;
  out << "#vocab\t" << header.dump() << "\n";
  for (std::size_t i = 0; i < vocab.terms.size(); ++i) {
    out << vocab.terms[i] << "\t" << i << "\t" << vocab.df[i] << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

std::pair<Vocabulary, TfidfConfig> load_vocabulary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open vocabulary: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#vocab\t", 0) != 0)
    throw DataError(path + ": missing #vocab header");
  json header = json::parse(line.substr(7), nullptr, false);
  if (header.is_discarded()) throw DataError(path + ": malformed vocabulary header");
  TfidfConfig cfg = config_from_json(header.dump());
  Vocabulary vocab;
  vocab.n_docs = header.at("n_docs").get<std::size_t>();
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected term<TAB>col<TAB>df");
    const std::string term = line.substr(0, t1);
    const std::size_t col = std::stoull(line.substr(t1 + 1, t2 - t1 - 1));
    const std::size_t df = std::stoull(line.substr(t2 + 1));
    if (col != vocab.terms.size())
      throw DataError(path + ":" + std::to_string(line_no) + ": column ids out of order");
    vocab.index.emplace(term, static_cast<std::uint32_t>(col));
    vocab.terms.push_back(term);
    vocab.df.push_back(df);
  }
  return {std::move(vocab), cfg};
}

void save_vectors(const std::string& path, const std::vector<VectorRecord>& records,
                  const std::string& meta_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vectors: " + path);
  if (!meta_json.empty()) out << "# " << meta_json << "\n";
  char buf[64];
  for (const auto& rec : records) {
    out << rec.id << " " << (rec.label ? *rec.label : -1);
    for (const auto& e : rec.vector.entries) {
      std::snprintf(buf, sizeof(buf), " %u:%.17g", e.col, e.weight);
      out << buf;
    }
    out << "\n";
  }
  if (!out) throw DataError("write failed: " + path);
}

std::vector<VectorRecord> load_vectors(const std::string& path, std::size_t dim_hint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open vectors: " + path);
  std::vector<VectorRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    VectorRecord rec;
    int label = -1;
    if (!(ss >> rec.id >> label))
      throw DataError(path + ":" + std::to_string(line_no) + ": expected id and label");
    if (label != -1 && label != 0 && label != 1)
      throw DataError(path + ":" + std::to_string(line_no) + ": label must be -1, 0 or 1");
    if (label != -1) rec.label = label;
    std::string pair;
    std::uint32_t max_col = 0;
    while (ss >> pair) {
      std::size_t colon = pair.find(':');
      if (colon == std::string::npos)
        throw DataError(path + ":" + std::to_string(line_no) + ": expected col:weight");
      SparseEntry e;
      e.col = static_cast<std::uint32_t>(std::stoul(pair.substr(0, colon)));
      e.weight = std::stod(pair.substr(colon + 1));
      max_col = std::max(max_col, e.col);
      rec.vector.entries.push_back(e);
    }
    rec.vector.dim = rec.vector.entries.empty() ? 0 : max_col + 1;
    if (dim_hint > 0) {
      if (rec.vector.dim > dim_hint)
        throw DataError(path + ":" + std::to_string(line_no) + ": column id exceeds dimension");
      rec.vector.dim = dim_hint;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace tahqiq::features
