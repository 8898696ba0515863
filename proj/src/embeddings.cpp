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

#include "tahqiq/embeddings.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "tahqiq/errors.hpp"
#include "tahqiq/kernels.hpp"
#include "tahqiq/rng.hpp"
#include "tahqiq/utf8.hpp"

namespace tahqiq::embeddings {

namespace {

// -log(sigmoid(x)), computed on whichever side keeps exp() small.
double softplus_neg(double x) {
  return x > 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

void check_finite(const std::vector<double>& m, std::size_t epoch, const char* what) {
  for (double v : m)
    if (!std::isfinite(v))
      throw SolverError("non-finite " + std::string(what) + " value after epoch " +
                        std::to_string(epoch));
}

// Pending mini-batch deltas, keyed by (matrix, row). Pool rows are reused
// across batches to keep the hot loop allocation-free.
class DeltaBatch {
 public:
  DeltaBatch(std::size_t dim) : dim_(dim) {}

  double* acquire(std::uint64_t key) {
    auto [it, fresh] = slots_.try_emplace(key, used_);
    if (!fresh) return pool_.data() + it->second * dim_;
    if ((used_ + 1) * dim_ > pool_.size()) pool_.resize((used_ + 1) * dim_);
    double* row = pool_.data() + used_ * dim_;
    std::fill(row, row + dim_, 0.0);
    keys_.resize(used_ + 1);
    keys_[used_] = key;
    ++used_;
    return row;
  }

  template <typename Apply>
  void flush(Apply&& apply) {
    for (std::size_t i = 0; i < used_; ++i)
      apply(keys_[i], pool_.data() + i * dim_);
    slots_.clear();
    used_ = 0;
  }

 private:
  std::size_t dim_;
  std::unordered_map<std::uint64_t, std::size_t> slots_;
  std::vector<double> pool_;
  std::vector<std::uint64_t> keys_;
  std::size_t used_ = 0;
};

constexpr std::uint64_t kMatInput = 0;
constexpr std::uint64_t kMatOutput = 1;
constexpr std::uint64_t kMatBucket = 2;

std::uint64_t delta_key(std::uint64_t matrix, std::size_t row) {
  return (matrix << 48) | static_cast<std::uint64_t>(row);
}

struct EvalWindow {
  std::size_t sentence = 0;
  std::size_t target = 0;
  std::vector<std::size_t> negatives;
};

class Trainer {
 public:
  Trainer(const TokenCorpus& corpus, const EmbedTrainConfig& cfg)
      : cfg_(cfg), vocab_(build_embed_vocab(corpus, cfg)) {
    std::size_t total_tokens = 0;
    for (const auto& s : corpus) total_tokens += s.size();
    if (total_tokens < 2)
      throw DataError("embedding corpus must contain at least 2 tokens");

    for (const auto& s : corpus) {
      std::vector<std::size_t> rows;
      for (const auto& tok : s) {
        auto it = vocab_.word_to_row.find(tok);
        if (it != vocab_.word_to_row.end()) rows.push_back(it->second);
      }
      if (!rows.empty()) sentences_.push_back(std::move(rows));
    }
    for (const auto& s : sentences_)
      if (s.size() >= 2) windows_per_epoch_ += s.size();
    if (windows_per_epoch_ == 0)
      throw DataError("corpus yields no context windows to train on");

    noise_cdf_.reserve(vocab_.noise.size());
    double acc = 0.0;
    for (double p : vocab_.noise) {
      acc += p;
      noise_cdf_.push_back(acc);
    }
    noise_cdf_.back() = 1.0;

    std::size_t v = vocab_.words.size(), d = cfg_.dim;
    Rng init_rng(splitmix64(cfg_.seed));
    double half = 0.5 / static_cast<double>(d);
    input_.resize(v * d);
    for (auto& x : input_) x = init_rng.uniform(-half, half);
    output_.assign(v * d, 0.0);
    if (cfg_.mode == EmbedMode::fasttext) {
      buckets_.resize(cfg_.buckets * d);
      for (auto& x : buckets_) x = init_rng.uniform(-half, half);
      subwords_.resize(v);
      for (std::size_t r = 0; r < v; ++r)
        for (const auto& g :
             subword_ngrams(vocab_.words[r], cfg_.subword_min, cfg_.subword_max))
          subwords_[r].push_back(subword_bucket(g, cfg_.buckets));
    }

    pick_eval_windows();
  }

  EmbeddingTable run(EmbedTrainStats* stats) {
    if (stats) {
      stats->windows_per_epoch = windows_per_epoch_;
      stats->initial_loss = heldout_loss();
      stats->epoch_loss.clear();
    }
    std::size_t total = cfg_.epochs * windows_per_epoch_;
    for (std::size_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
      if (cfg_.workers <= 1) {
        run_shard(0, 1, total);
      } else {
        std::vector<std::thread> crew;
        for (std::size_t w = 0; w < cfg_.workers; ++w)
          crew.emplace_back([this, w, total] { run_shard(w, cfg_.workers, total); });
        for (auto& t : crew) t.join();
      }
      check_finite(input_, epoch + 1, "input vector");
      check_finite(output_, epoch + 1, "output vector");
      if (cfg_.mode == EmbedMode::fasttext)
        check_finite(buckets_, epoch + 1, "bucket vector");
      if (stats) stats->epoch_loss.push_back(heldout_loss());
    }
    return finalize();
  }

 private:
  std::size_t dim() const { return cfg_.dim; }
  double* in_row(std::size_t r) { return input_.data() + r * dim(); }
  double* out_row(std::size_t r) { return output_.data() + r * dim(); }
  double* bucket_row(std::size_t b) { return buckets_.data() + b * dim(); }

  std::size_t sample_noise(Rng& rng) const {
    double u = rng.uniform();
    auto it = std::upper_bound(noise_cdf_.begin(), noise_cdf_.end(), u);
    if (it == noise_cdf_.end()) --it;
    return static_cast<std::size_t>(it - noise_cdf_.begin());
  }

  // h = mean over context words of the (possibly composed) input vector.
  // Returns the context size.
  std::size_t compose_context(const std::vector<std::size_t>& sent, std::size_t t,
                              double* h) {
    std::fill(h, h + dim(), 0.0);
    std::size_t lo = t >= cfg_.window ? t - cfg_.window : 0;
    std::size_t hi = std::min(sent.size() - 1, t + cfg_.window);
    std::size_t n = 0;
    for (std::size_t p = lo; p <= hi; ++p) {
      if (p == t) continue;
      std::size_t c = sent[p];
      kernels::axpy(1.0, in_row(c), h, dim());
      if (cfg_.mode == EmbedMode::fasttext)
        for (std::size_t b : subwords_[c]) kernels::axpy(1.0, bucket_row(b), h, dim());
      ++n;
    }
    if (n > 0) kernels::scale(1.0 / static_cast<double>(n), h, dim());
    return n;
  }

  void pick_eval_windows() {
    std::vector<std::pair<std::size_t, std::size_t>> all;
    for (std::size_t s = 0; s < sentences_.size(); ++s) {
      if (sentences_[s].size() < 2) continue;
      for (std::size_t t = 0; t < sentences_[s].size(); ++t) all.push_back({s, t});
    }
    std::size_t stride = std::max<std::size_t>(1, all.size() / 64);
    Rng eval_rng(splitmix64(cfg_.seed ^ 0x5E15EDull));
    for (std::size_t i = 0; i < all.size() && eval_.size() < 64; i += stride) {
      EvalWindow w;
      w.sentence = all[i].first;
      w.target = all[i].second;
      for (std::size_t s = 0; s < cfg_.negatives; ++s)
        w.negatives.push_back(sample_noise(eval_rng));
      eval_.push_back(std::move(w));
    }
  }

  double heldout_loss() {
    std::vector<double> h(dim());
    double total = 0.0;
    for (const auto& w : eval_) {
      const auto& sent = sentences_[w.sentence];
      compose_context(sent, w.target, h.data());
      std::size_t target = sent[w.target];
      double loss = softplus_neg(kernels::dot(out_row(target), h.data(), dim()));
      for (std::size_t neg : w.negatives) {
        if (neg == target) continue;
        loss += softplus_neg(-kernels::dot(out_row(neg), h.data(), dim()));
      }
      total += loss;
    }
    return eval_.empty() ? 0.0 : total / static_cast<double>(eval_.size());
  }

  void run_shard(std::size_t shard, std::size_t n_shards, std::size_t total) {
    Rng rng(splitmix64(cfg_.seed + 0x9A17 * (shard + 1)));
    DeltaBatch batch(dim());
    std::vector<double> h(dim()), grad_h(dim());
    double lr = current_lr(total);
    std::size_t in_batch = 0;

    auto apply = [this](std::uint64_t key, const double* delta) {
      std::size_t row = static_cast<std::size_t>(key & 0xFFFFFFFFFFFFull);
      switch (key >> 48) {
        case kMatInput: kernels::axpy(1.0, delta, in_row(row), dim()); break;
        case kMatOutput: kernels::axpy(1.0, delta, out_row(row), dim()); break;
        default: kernels::axpy(1.0, delta, bucket_row(row), dim()); break;
      }
    };

    for (std::size_t s = shard; s < sentences_.size(); s += n_shards) {
      const auto& sent = sentences_[s];
      if (sent.size() < 2) continue;
      for (std::size_t t = 0; t < sent.size(); ++t) {
        std::size_t n_ctx = compose_context(sent, t, h.data());
        if (n_ctx == 0) continue;
        std::size_t target = sent[t];
        std::fill(grad_h.begin(), grad_h.end(), 0.0);
        for (std::size_t s_i = 0; s_i <= cfg_.negatives; ++s_i) {
          std::size_t w = s_i == 0 ? target : sample_noise(rng);
          if (s_i > 0 && w == target) continue;
          double label = s_i == 0 ? 1.0 : 0.0;
          double f = 1.0 / (1.0 + std::exp(-kernels::dot(out_row(w), h.data(), dim())));
          double e = f - label;
          kernels::axpy(e, out_row(w), grad_h.data(), dim());
          kernels::axpy(-lr * e, h.data(), batch.acquire(delta_key(kMatOutput, w)),
                        dim());
        }
        double coef = -lr / static_cast<double>(n_ctx);
        std::size_t lo = t >= cfg_.window ? t - cfg_.window : 0;
        std::size_t hi = std::min(sent.size() - 1, t + cfg_.window);
        for (std::size_t p = lo; p <= hi; ++p) {
          if (p == t) continue;
          std::size_t c = sent[p];
          kernels::axpy(coef, grad_h.data(), batch.acquire(delta_key(kMatInput, c)),
                        dim());
          if (cfg_.mode == EmbedMode::fasttext)
            for (std::size_t b : subwords_[c])
              kernels::axpy(coef, grad_h.data(),
                            batch.acquire(delta_key(kMatBucket, b)), dim());
        }
        processed_.fetch_add(1, std::memory_order_relaxed);
        if (++in_batch >= cfg_.batch) {
          batch.flush(apply);
          in_batch = 0;
          lr = current_lr(total);
        }
      }
    }
    batch.flush(apply);
  }

  double current_lr(std::size_t total) const {
    double frac = total == 0 ? 1.0
                             : std::min(1.0, static_cast<double>(processed_.load(
                                                 std::memory_order_relaxed)) /
                                                 static_cast<double>(total));
    return cfg_.learning_rate +
           (cfg_.min_learning_rate - cfg_.learning_rate) * frac;
  }

  EmbeddingTable finalize() {
    EmbeddingTable table;
    table.mode = cfg_.mode;
    table.dim = cfg_.dim;
    table.words = vocab_.words;
    table.vocab = vocab_.word_to_row;
    if (cfg_.mode == EmbedMode::cbow) {
      table.input_vectors = std::move(input_);
      return table;
    }
    table.buckets = cfg_.buckets;
    table.subword_min = cfg_.subword_min;
    table.subword_max = cfg_.subword_max;
    table.input_vectors.assign(vocab_.words.size() * cfg_.dim, 0.0);
    for (std::size_t r = 0; r < vocab_.words.size(); ++r) {
      double* dst = table.input_vectors.data() + r * cfg_.dim;
      kernels::axpy(1.0, in_row(r), dst, cfg_.dim);
      for (std::size_t b : subwords_[r]) kernels::axpy(1.0, bucket_row(b), dst, cfg_.dim);
    }
    table.bucket_vectors = std::move(buckets_);
    return table;
  }

  EmbedTrainConfig cfg_;
  EmbedVocab vocab_;
  std::vector<std::vector<std::size_t>> sentences_;
  std::vector<std::vector<std::size_t>> subwords_;
  std::vector<double> noise_cdf_;
  std::vector<double> input_, output_, buckets_;
  std::vector<EvalWindow> eval_;
  std::size_t windows_per_epoch_ = 0;
  std::atomic<std::uint64_t> processed_{0};
};

}  // namespace

std::string to_string(EmbedMode mode) {
  return mode == EmbedMode::cbow ? "cbow" : "fasttext";
}

EmbedMode mode_from_string(const std::string& name) {
  if (name == "cbow") return EmbedMode::cbow;
  if (name == "fasttext") return EmbedMode::fasttext;
  throw DataError("unknown embedding mode: " + name);
}

void EmbedTrainConfig::validate() const {
  if (dim < 1) throw DataError("embedding dim must be at least 1");
  if (window < 1) throw DataError("window must be at least 1");
  if (negatives < 1) throw DataError("negatives must be at least 1");
  if (min_count < 1) throw DataError("min_count must be at least 1");
  if (batch < 1) throw DataError("batch must be at least 1");
  if (subword_min < 1 || subword_min > subword_max)
    throw DataError("subword range invalid: need 1 <= min <= max");
  if (buckets < 1) throw DataError("buckets must be at least 1");
  if (!(learning_rate > 0.0)) throw DataError("learning_rate must be positive");
  if (!(min_learning_rate > 0.0) || min_learning_rate > learning_rate)
    throw DataError("min_learning_rate must lie in (0, learning_rate]");
  if (workers < 1) throw DataError("workers must be at least 1");
}

std::string embed_config_json(const EmbedTrainConfig& cfg) {
  nlohmann::json j{{"dim", cfg.dim},
                   {"window", cfg.window},
                   {"negatives", cfg.negatives},
                   {"min_count", cfg.min_count},
                   {"epochs", cfg.epochs},
                   {"batch", cfg.batch},
                   {"mode", to_string(cfg.mode)},
                   {"subword_min", cfg.subword_min},
                   {"subword_max", cfg.subword_max},
                   {"buckets", cfg.buckets},
                   {"learning_rate", cfg.learning_rate},
                   {"min_learning_rate", cfg.min_learning_rate},
                   {"workers", cfg.workers},
                   {"seed", cfg.seed}};
  return j.dump(2);
}

EmbedTrainConfig embed_config_from_json(const std::string& text) {
  EmbedTrainConfig cfg;
  try {
    auto j = nlohmann::json::parse(text);
    cfg.dim = j.at("dim").get<std::size_t>();
    cfg.window = j.at("window").get<std::size_t>();
    cfg.negatives = j.at("negatives").get<std::size_t>();
    cfg.min_count = j.at("min_count").get<std::size_t>();
    cfg.epochs = j.at("epochs").get<std::size_t>();
    cfg.batch = j.at("batch").get<std::size_t>();
    cfg.mode = mode_from_string(j.at("mode").get<std::string>());
    cfg.subword_min = j.at("subword_min").get<std::size_t>();
    cfg.subword_max = j.at("subword_max").get<std::size_t>();
    cfg.buckets = j.at("buckets").get<std::size_t>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.min_learning_rate = j.at("min_learning_rate").get<double>();
    cfg.workers = j.at("workers").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed embedding config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

EmbedVocab build_embed_vocab(const TokenCorpus& corpus, const EmbedTrainConfig& cfg) {
  cfg.validate();
  if (corpus.empty()) throw DataError("embedding corpus is empty");
  std::map<std::string, std::uint64_t> counts;
  for (const auto& sent : corpus)
    for (const auto& tok : sent) ++counts[tok];

  EmbedVocab vocab;
  for (const auto& [word, count] : counts) {
    if (count < cfg.min_count) continue;
    vocab.word_to_row[word] = vocab.words.size();
    vocab.words.push_back(word);
    vocab.counts.push_back(count);
  }
  if (vocab.words.empty())
    throw DataError("every word fell below min_count=" +
                    std::to_string(cfg.min_count));

  double total = 0.0;
  vocab.noise.reserve(vocab.counts.size());
  for (std::uint64_t c : vocab.counts) {
    double p = std::pow(static_cast<double>(c), 0.75);
    vocab.noise.push_back(p);
    total += p;
  }
  for (double& p : vocab.noise) p /= total;
  return vocab;
}

EmbeddingTable train_embeddings(const TokenCorpus& corpus, const EmbedTrainConfig& cfg,
                                EmbedTrainStats* stats) {
  cfg.validate();
  Trainer trainer(corpus, cfg);
  return trainer.run(stats);
}

EmbeddingTable train_cbow(const TokenCorpus& corpus, const EmbedTrainConfig& cfg,
                          EmbedTrainStats* stats) {
  if (cfg.mode != EmbedMode::cbow) throw DataError("config mode is not cbow");
  return train_embeddings(corpus, cfg, stats);
}

EmbeddingTable train_fasttext(const TokenCorpus& corpus, const EmbedTrainConfig& cfg,
                              EmbedTrainStats* stats) {
  if (cfg.mode != EmbedMode::fasttext) throw DataError("config mode is not fasttext");
  return train_embeddings(corpus, cfg, stats);
}

std::optional<std::vector<double>> word_vector(const EmbeddingTable& table,
                                               const std::string& word) {
  auto it = table.vocab.find(word);
  if (it != table.vocab.end()) {
    const double* r = table.row(it->second);
    return std::vector<double>(r, r + table.dim);
  }
  if (table.mode != EmbedMode::fasttext) return std::nullopt;
  auto grams = subword_ngrams(word, table.subword_min, table.subword_max);
  if (grams.empty()) return std::nullopt;
  std::vector<double> v(table.dim, 0.0);
  for (const auto& g : grams)
    kernels::axpy(1.0, table.bucket_row(subword_bucket(g, table.buckets)), v.data(),
                  table.dim);
  return v;
}

TweetVector tweet_vector(const EmbeddingTable& table,
                         const std::vector<std::string>& tokens) {
  TweetVector out;
  out.values.assign(table.dim, 0.0);
  for (const auto& tok : tokens) {
    auto v = word_vector(table, tok);
    if (!v) continue;
    kernels::axpy(1.0, v->data(), out.values.data(), table.dim);
    ++out.n_words;
  }
  if (out.n_words > 0)
    kernels::scale(1.0 / static_cast<double>(out.n_words), out.values.data(),
                   table.dim);
  return out;
}

void save_table(const std::string& path, const EmbeddingTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write embedding table: " + path);
  out << table.size() << ' ' << table.dim << '\n';
  char buf[32];
  for (std::size_t r = 0; r < table.size(); ++r) {
    out << table.words[r];
    const double* row = table.row(r);
    for (std::size_t j = 0; j < table.dim; ++j) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(
                        static_cast<float>(row[j])));
      out << ' ' << buf;
    }
    out << '\n';
  }
  if (table.mode == EmbedMode::fasttext) {
    out << "TQFTB1 " << table.buckets << ' ' << table.dim << ' ' << table.subword_min
        << ' ' << table.subword_max << '\n';
    std::vector<float> chunk;
    const std::size_t stride = 1 << 16;
    std::size_t n = table.bucket_vectors.size();
    for (std::size_t i = 0; i < n; i += stride) {
      std::size_t count = std::min(stride, n - i);
      chunk.resize(count);
      for (std::size_t j = 0; j < count; ++j)
        chunk[j] = static_cast<float>(table.bucket_vectors[i + j]);
      out.write(reinterpret_cast<const char*>(chunk.data()),
                static_cast<std::streamsize>(count * sizeof(float)));
    }
  }
  if (!out) throw DataError("short write while saving embedding table: " + path);
}

EmbeddingTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read embedding table: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty embedding file: " + path);
  std::istringstream header(line);
  std::size_t v = 0, d = 0;
  if (!(header >> v >> d) || d == 0)
    throw DataError("malformed embedding header: " + line);

  EmbeddingTable table;
  table.dim = d;
  table.input_vectors.reserve(v * d);
  for (std::size_t r = 0; r < v; ++r) {
    if (!std::getline(in, line))
      throw DataError("embedding file ends early at row " + std::to_string(r));
    std::istringstream row(line);
    std::string word;
    if (!(row >> word)) throw DataError("blank embedding row " + std::to_string(r));
    std::vector<double> values;
    double x = 0.0;
    // the text section carries float32 precision; normalize through float so
    // save/load is an exact round trip at that width
    while (row >> x) values.push_back(static_cast<double>(static_cast<float>(x)));
    if (values.size() != d)
      throw DataError("embedding row " + std::to_string(r) + " (word '" + word +
                      "') has " + std::to_string(values.size()) +
                      " values, expected " + std::to_string(d));
    if (table.vocab.count(word))
      throw DataError("duplicate word in embedding file: " + word);
    table.vocab[word] = table.words.size();
    table.words.push_back(word);
    table.input_vectors.insert(table.input_vectors.end(), values.begin(),
                               values.end());
  }

  if (!std::getline(in, line) || line.empty()) {
    table.mode = EmbedMode::cbow;
    return table;
  }
  std::istringstream trailer(line);
  std::string magic;
  std::size_t buckets = 0, bdim = 0, smin = 0, smax = 0;
  if (!(trailer >> magic >> buckets >> bdim >> smin >> smax) || magic != "TQFTB1")
    throw DataError("unrecognized embedding trailer: " + line);
  if (bdim != d)
    throw DataError("bucket section dimension " + std::to_string(bdim) +
                    " does not match header dimension " + std::to_string(d));
  table.mode = EmbedMode::fasttext;
  table.buckets = buckets;
  table.subword_min = smin;
  table.subword_max = smax;
  table.bucket_vectors.resize(buckets * d);
  std::vector<float> chunk;
  const std::size_t stride = 1 << 16;
  for (std::size_t i = 0; i < table.bucket_vectors.size(); i += stride) {
    std::size_t count = std::min(stride, table.bucket_vectors.size() - i);
    chunk.resize(count);
    in.read(reinterpret_cast<char*>(chunk.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float))
      throw DataError("truncated bucket section in " + path);
    for (std::size_t j = 0; j < count; ++j)
      table.bucket_vectors[i + j] = static_cast<double>(chunk[j]);
  }
  return table;
}

std::vector<std::pair<std::string, double>> nearest_neighbors(
    const EmbeddingTable& table, const std::string& word, std::size_t k) {
  auto query = word_vector(table, word);
  if (!query) throw DataError("word not resolvable in this table: " + word);
  double qnorm = std::sqrt(kernels::dot(query->data(), query->data(), table.dim));

  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(table.size());
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (table.words[r] == word) continue;
    const double* row = table.row(r);
    double rnorm = std::sqrt(kernels::dot(row, row, table.dim));
    double cosine = qnorm > 0.0 && rnorm > 0.0
                        ? kernels::dot(query->data(), row, table.dim) / (qnorm * rnorm)
                        : 0.0;
    scored.push_back({table.words[r], cosine});
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

std::vector<std::string> subword_ngrams(const std::string& word, std::size_t n_min,
                                        std::size_t n_max) {
  std::vector<char32_t> cps;
  cps.push_back(U'<');
  for (char32_t cp : utf8::decode(word)) cps.push_back(cp);
  cps.push_back(U'>');

  std::vector<std::string> grams;
  for (std::size_t n = n_min; n <= n_max && n <= cps.size(); ++n)
    for (std::size_t start = 0; start + n <= cps.size(); ++start)
      grams.push_back(
          utf8::encode(std::vector<char32_t>(cps.begin() + start,
                                             cps.begin() + start + n)));
  return grams;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace tahqiq::embeddings
