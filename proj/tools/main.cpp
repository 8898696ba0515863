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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tahqiq/arabic.hpp"
#include "tahqiq/corpus.hpp"
#include "tahqiq/embeddings.hpp"
#include "tahqiq/errors.hpp"
#include "tahqiq/eval.hpp"
#include "tahqiq/features.hpp"
#include "tahqiq/grid.hpp"
#include "tahqiq/models.hpp"
#include "tahqiq/neural.hpp"

namespace {

namespace ar = tahqiq::arabic;
namespace co = tahqiq::corpus;
namespace em = tahqiq::embeddings;
namespace ev = tahqiq::eval;
namespace fe = tahqiq::features;
namespace gr = tahqiq::grid;
namespace mo = tahqiq::models;
namespace ne = tahqiq::neural;
using tahqiq::DataError;
using tahqiq::SolverError;

constexpr int kExitOk = 0;
constexpr int kExitData = 2;
constexpr int kExitUsage = 64;
constexpr int kExitInternal = 70;

// Post-parse flag contradictions that CLI11 cannot express (conditional
// requirements); mapped to the usage exit code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write: " + path);
  out << text;
  if (!out) throw DataError("short write: " + path);
}

ar::PreprocessConfig make_preprocess_config(const std::string& stemmer,
                                            const std::string& stoplist) {
  ar::PreprocessConfig cfg;
  cfg.stemmer = stemmer == "none" ? ar::Stemmer::none : ar::Stemmer::light;
  if (!stoplist.empty()) cfg.stops = ar::StopList::load(stoplist);
  return cfg;
}

// ---------------------------------------------------------------- preprocess

struct PreprocessOpts {
  std::string input, output, stoplist;
  std::string stemmer = "light";
};

int run_preprocess(const PreprocessOpts& o) {
  ar::PreprocessConfig cfg = make_preprocess_config(o.stemmer, o.stoplist);
  auto records = co::load_records(o.input, co::format_from_path(o.input));
  std::vector<co::TokenizedRecord> out;
  out.reserve(records.size());
  for (const auto& r : records)
    out.push_back({r.id, ar::preprocess(r.text, cfg), r.label});

  nlohmann::json meta{{"command", "preprocess"},
                      {"input", o.input},
                      {"stemmer", o.stemmer},
                      {"stoplist", o.stoplist.empty() ? "builtin" : o.stoplist}};
  co::save_tokens(o.output, out, meta.dump());
  std::printf("wrote %zu token records to %s\n", out.size(), o.output.c_str());
  return kExitOk;
}

// --------------------------------------------------------------- embed-train

struct EmbedOpts {
  std::string input, output;
  std::string mode = "cbow";
  em::EmbedTrainConfig cfg;
};

std::vector<std::vector<std::string>> token_lists(
    const std::vector<co::TokenizedRecord>& records) {
  std::vector<std::vector<std::string>> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.tokens);
  return out;
}

int run_embed_train(EmbedOpts& o) {
  o.cfg.mode = em::mode_from_string(o.mode);
  auto records = co::load_tokens(o.input);
  em::EmbedTrainStats stats;
  em::EmbeddingTable table = em::train_embeddings(token_lists(records), o.cfg, &stats);
  em::save_table(o.output, table);

  nlohmann::json meta{{"command", "embed-train"},
                      {"input", o.input},
                      {"config", nlohmann::json::parse(em::embed_config_json(o.cfg))},
                      {"vocab_size", table.size()},
                      {"windows_per_epoch", stats.windows_per_epoch},
                      {"epoch_loss", stats.epoch_loss}};
  write_text(o.output + ".meta.json", meta.dump(2) + "\n");

  std::printf("trained %zu x %zu embeddings from %s\n", table.size(), table.dim,
              o.input.c_str());
  return kExitOk;
}

// ----------------------------------------------------------------- featurize

struct FeaturizeOpts {
  std::string tokens, output, features, embeddings, vocab_out;
  fe::TfidfConfig tfidf;
  std::string log_base = "natural";
};

bool is_tfidf(const std::string& features) {
  return features == "tfidf-uni" || features == "tfidf-ngram";
}

std::vector<fe::VectorRecord> embed_records(const std::vector<co::TokenizedRecord>& records,
                                            const em::EmbeddingTable& table) {
  std::vector<fe::VectorRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    em::TweetVector tv = em::tweet_vector(table, r.tokens);
    fe::SparseVector v;
    v.dim = table.dim;
    for (std::size_t c = 0; c < tv.values.size(); ++c)
      if (tv.values[c] != 0.0)
        v.entries.push_back({static_cast<std::uint32_t>(c), tv.values[c]});
    out.push_back({r.id, r.label, std::move(v)});
  }
  return out;
}

nlohmann::json featurize_meta(const FeaturizeOpts& o) {
  nlohmann::json meta{{"command", "featurize"},
                      {"tokens", o.tokens},
                      {"features", o.features}};
  if (is_tfidf(o.features))
    meta["config"] = nlohmann::json::parse(fe::config_json(o.tfidf));
  else
    meta["embeddings"] = o.embeddings;
  return meta;
}

int run_featurize(FeaturizeOpts& o) {
  auto records = co::load_tokens(o.tokens);
  std::vector<fe::VectorRecord> out;

  if (is_tfidf(o.features)) {
    o.tfidf.ngram_mode = o.features == "tfidf-uni" ? fe::NgramMode::unigram
                                                   : fe::NgramMode::bi_tri;
    o.tfidf.log_base = fe::log_base_from_string(o.log_base);
    auto lists = token_lists(records);
    fe::Vocabulary vocab = fe::fit_vocabulary(lists, o.tfidf);
    auto vectors = fe::transform_corpus(lists, vocab, o.tfidf);
    for (std::size_t i = 0; i < records.size(); ++i)
      out.push_back({records[i].id, records[i].label, std::move(vectors[i])});
    if (!o.vocab_out.empty()) fe::save_vocabulary(o.vocab_out, vocab, o.tfidf);
  } else {
    if (o.embeddings.empty())
      throw UsageError("--embeddings is required for " + o.features + " features");
    em::EmbeddingTable table = em::load_table(o.embeddings);
    if (em::to_string(table.mode) != o.features)
      throw DataError("embedding file mode " + em::to_string(table.mode) +
                      " does not match --features " + o.features);
    out = embed_records(records, table);
  }

  fe::save_vectors(o.output, out, featurize_meta(o).dump());
  std::printf("wrote %zu feature vectors to %s\n", out.size(), o.output.c_str());
  return kExitOk;
}

// --------------------------------------------------------------------- train

struct TrainOpts {
  std::string tokens, features, embeddings, params, outdir;
  std::string model;
  double split = 0.8;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double threshold = -1.0;  // <0: model default

  // cnn-specific
  std::string embed_init = "random";
  std::string loss = "ce";
  ne::CnnConfig cnn;
  std::string kernels = "4,5";
  std::size_t max_words = 0;
  bool frozen = false;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct SplitData {
  std::vector<co::TokenizedRecord> train, test;
};

SplitData split_records(const std::vector<co::TokenizedRecord>& records, double frac,
                        std::uint64_t seed) {
  std::vector<int> labels;
  for (const auto& r : records) {
    if (!r.label) throw DataError("record " + r.id + " is unlabeled");
    labels.push_back(*r.label);
  }
  co::SplitSpec spec;
  spec.fractions = {frac, 1.0 - frac};
  spec.seed = seed;
  auto parts = co::split_indices(labels, spec);
  SplitData out;
  for (std::size_t i : parts[0]) out.train.push_back(records[i]);
  for (std::size_t i : parts[1]) out.test.push_back(records[i]);
  return out;
}

// Vectors for both splits; TF-IDF vocabularies are fit on the training side
// only so the test set stays unseen.
struct FeaturePair {
  mo::FeatureMatrix train, test;
  nlohmann::json config;
};

mo::FeatureMatrix to_matrix(const std::vector<fe::VectorRecord>& records,
                            std::size_t dim) {
  mo::FeatureMatrix X;
  X.dim = dim;
  for (const auto& r : records) {
    if (!r.label) throw DataError("record " + r.id + " is unlabeled");
    fe::SparseVector v = r.vector;
    v.dim = dim;
    X.rows.push_back(std::move(v));
    X.labels.push_back(*r.label);
  }
  return X;
}

FeaturePair featurize_splits(const SplitData& data, const TrainOpts& o) {
  FeaturePair out;
  if (is_tfidf(o.features)) {
    fe::TfidfConfig cfg;
    cfg.ngram_mode = o.features == "tfidf-uni" ? fe::NgramMode::unigram
                                               : fe::NgramMode::bi_tri;
    auto train_lists = token_lists(data.train);
    fe::Vocabulary vocab = fe::fit_vocabulary(train_lists, cfg);
    auto mk = [&](const std::vector<co::TokenizedRecord>& recs) {
      mo::FeatureMatrix X;
      X.dim = vocab.size();
      for (const auto& r : recs) {
        if (!r.label) throw DataError("record " + r.id + " is unlabeled");
        X.rows.push_back(fe::tfidf_vector(r.tokens, vocab, cfg));
        X.labels.push_back(*r.label);
      }
      return X;
    };
    out.train = mk(data.train);
    out.test = mk(data.test);
    out.config = nlohmann::json::parse(fe::config_json(cfg));
  } else {
    if (o.embeddings.empty())
      throw UsageError("--embeddings is required for " + o.features + " features");
    em::EmbeddingTable table = em::load_table(o.embeddings);
    auto mk = [&](const std::vector<co::TokenizedRecord>& recs) {
      auto vrecs = embed_records(recs, table);
      return to_matrix(vrecs, table.dim);
    };
    out.train = mk(data.train);
    out.test = mk(data.test);
    out.config = {{"embeddings", o.embeddings}, {"dim", table.dim}};
  }
  return out;
}

void write_metrics(const std::string& path, const ev::MetricsReport& report,
                   const nlohmann::json& config) {
  nlohmann::json doc{{"config", config},
                     {"metrics", nlohmann::json::parse(ev::metrics_json(report))}};
  write_text(path, doc.dump(2) + "\n");
}

int run_train_classical(const TrainOpts& o) {
  auto records = co::load_tokens(o.tokens);
  SplitData data = split_records(records, o.split, o.seed);
  FeaturePair feats = featurize_splits(data, o);

  mo::ModelSpec spec;
  if (!o.params.empty()) {
    spec = mo::spec_from_json(slurp(o.params));
    if (mo::to_string(spec.kind) != o.model)
      throw DataError("--params file is for model kind " + mo::to_string(spec.kind) +
                      ", not " + o.model);
    if (o.seed_set) spec.seed = o.seed;
  } else {
    spec.kind = mo::kind_from_string(o.model);
    spec.seed = o.seed;
  }
  mo::validate_spec(spec);

  auto model = mo::train(feats.train, spec);
  auto scores = mo::predict_scores(*model, feats.test);
  double threshold = o.threshold >= 0.0 ? o.threshold : model->default_threshold();
  ev::MetricsReport report = ev::compute_metrics(feats.test.labels, scores, threshold);

  std::filesystem::create_directories(o.outdir);
  nlohmann::json config{{"command", "train"},
                        {"tokens", o.tokens},
                        {"features", o.features},
                        {"feature_config", feats.config},
                        {"model", o.model},
                        {"spec", nlohmann::json::parse(mo::spec_json(spec))},
                        {"split", o.split},
                        {"seed", spec.seed},
                        {"threshold", threshold}};
  mo::save_model(o.outdir + "/model.json", *model);
  write_metrics(o.outdir + "/metrics.json", report, config);
  ev::save_roc_csv(o.outdir + "/roc.csv", ev::roc_auc(feats.test.labels, scores).first);

  std::printf("model %s: test auc %.4f f1 %.4f -> %s\n", o.model.c_str(), report.auc,
              report.f1, o.outdir.c_str());
  return kExitOk;
}

std::vector<std::size_t> parse_kernels(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      out.push_back(static_cast<std::size_t>(std::stoul(part)));
    } catch (const std::exception&) {
      throw UsageError("bad --kernels entry: " + part);
    }
  }
  if (out.empty()) throw UsageError("--kernels must list at least one size");
  return out;
}

int run_train_cnn(const TrainOpts& o, const CLI::App& cmd) {
  auto records = co::load_tokens(o.tokens);
  SplitData data = split_records(records, o.split, o.seed);
  // carve a validation slice off the training split for best-epoch selection
  SplitData inner;
  {
    std::vector<int> labels;
    for (const auto& r : data.train) labels.push_back(*r.label);
    co::SplitSpec spec;
    spec.fractions = {0.8, 0.2};
    spec.seed = o.seed + 1;
    auto parts = co::split_indices(labels, spec);
    for (std::size_t i : parts[0]) inner.train.push_back(data.train[i]);
    for (std::size_t i : parts[1]) inner.test.push_back(data.train[i]);
  }

  // a params file gives the base config; explicitly passed flags override it
  ne::CnnConfig cfg;
  if (!o.params.empty()) {
    cfg = ne::cnn_config_from_json(slurp(o.params));
  } else {
    cfg = o.cnn;
    cfg.kernel_sizes = parse_kernels(o.kernels);
    cfg.embed_init = ne::embed_init_from_string(o.embed_init);
    cfg.loss = ne::loss_from_string(o.loss);
    cfg.trainable_embeddings = !o.frozen;
    cfg.seed = o.seed;
  }
  if (cmd.count("--kernels")) cfg.kernel_sizes = parse_kernels(o.kernels);
  if (cmd.count("--embed-init")) cfg.embed_init = ne::embed_init_from_string(o.embed_init);
  if (cmd.count("--loss")) cfg.loss = ne::loss_from_string(o.loss);
  if (cmd.count("--epochs")) cfg.epochs = o.cnn.epochs;
  if (cmd.count("--batch")) cfg.batch = o.cnn.batch;
  if (cmd.count("--lr")) cfg.lr = o.cnn.lr;
  if (cmd.count("--max-seq-len")) cfg.max_sequence_length = o.cnn.max_sequence_length;
  if (cmd.count("--embed-dim")) cfg.embed_dim = o.cnn.embed_dim;
  if (cmd.count("--dropout")) cfg.dropout = o.cnn.dropout;
  if (cmd.count("--filters")) cfg.filters_per_kernel = o.cnn.filters_per_kernel;
  if (cmd.count("--frozen-embeddings")) cfg.trainable_embeddings = !o.frozen;
  if (o.seed_set) cfg.seed = o.seed;

  ne::TokenVocab vocab = ne::build_token_vocab(token_lists(inner.train), o.max_words);
  cfg.vocab_size = vocab.size();

  ne::CnnModel model;
  if (cfg.embed_init == ne::EmbedInit::random) {
    cfg.validate();
    model = ne::build_cnn(cfg);
  } else {
    if (o.embeddings.empty())
      throw UsageError("--embeddings is required for --embed-init " +
                       ne::to_string(cfg.embed_init));
    em::EmbeddingTable table = em::load_table(o.embeddings);
    if (em::to_string(table.mode) != ne::to_string(cfg.embed_init))
      throw DataError("embedding file mode " + em::to_string(table.mode) +
                      " does not match embed init " + ne::to_string(cfg.embed_init));
    cfg.embed_dim = table.dim;
    cfg.validate();
    model = ne::build_cnn(cfg, vocab, table);
  }

  auto encode = [&](const std::vector<co::TokenizedRecord>& recs) {
    std::vector<int> labels;
    for (const auto& r : recs) labels.push_back(*r.label);
    return ne::encode_batch(vocab, token_lists(recs), labels, cfg.max_sequence_length);
  };
  ne::PaddedBatch train_batch = encode(inner.train);
  ne::PaddedBatch val_batch = encode(inner.test);
  ne::PaddedBatch test_batch = encode(data.test);

  ne::CnnTrainResult result = ne::train_cnn(model, train_batch, val_batch);
  auto scores = ne::forward(model, test_batch, false);
  double threshold = o.threshold >= 0.0 ? o.threshold : 0.5;
  ev::MetricsReport report = ev::compute_metrics(test_batch.labels, scores, threshold);

  std::filesystem::create_directories(o.outdir);
  nlohmann::json config{{"command", "train"},
                        {"tokens", o.tokens},
                        {"model", "cnn"},
                        {"cnn_config", nlohmann::json::parse(ne::cnn_config_json(cfg))},
                        {"split", o.split},
                        {"seed", o.seed},
                        {"threshold", threshold},
                        {"best_epoch", result.best_epoch},
                        {"best_val_auc", result.best_val_auc}};
  ne::save_cnn(o.outdir + "/model.bin", model);
  ne::save_history_csv(o.outdir + "/history.csv", result.history);
  write_metrics(o.outdir + "/metrics.json", report, config);
  ev::save_roc_csv(o.outdir + "/roc.csv", ev::roc_auc(test_batch.labels, scores).first);

  std::printf("model cnn: best val auc %.4f (epoch %zu), test auc %.4f -> %s\n",
              result.best_val_auc, result.best_epoch, report.auc, o.outdir.c_str());
  return kExitOk;
}

int run_train(const TrainOpts& o, const CLI::App& cmd) {
  if (o.model == "cnn") return run_train_cnn(o, cmd);
  if (o.features.empty())
    throw UsageError("--features is required for classical models");
  return run_train_classical(o);
}

// --------------------------------------------------------------- grid-search

struct GridOpts {
  std::string tokens, features, embeddings, model, grid, best_out, table_out;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
};

gr::GridSpec parse_grid_file(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(slurp(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed grid file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw DataError("grid file must be a JSON object");
  gr::GridSpec out;
  for (const auto& [name, values] : j.items()) {
    if (!values.is_array())
      throw DataError("grid parameter " + name + " must map to an array");
    for (const auto& v : values) {
      if (v.is_boolean())
        out[name].push_back(mo::ParamValue{v.get<bool>()});
      else if (v.is_number())
        out[name].push_back(mo::ParamValue{v.get<double>()});
      else if (v.is_string())
        out[name].push_back(mo::ParamValue{v.get<std::string>()});
      else
        throw DataError("grid parameter " + name + " holds an unsupported value");
    }
  }
  return out;
}

int run_grid_search(const GridOpts& o) {
  auto records = co::load_tokens(o.tokens);
  TrainOpts fopts;
  fopts.features = o.features;
  fopts.embeddings = o.embeddings;
  SplitData all;
  all.train = records;
  FeaturePair feats = featurize_splits(all, fopts);

  mo::ModelSpec base;
  base.kind = mo::kind_from_string(o.model);
  base.seed = o.seed;
  gr::GridSpec sweep = parse_grid_file(o.grid);
  gr::GridResult result = gr::grid_search(feats.train, base, sweep, o.folds, o.seed);

  const gr::GridPoint& winner = result.table[result.best_index];
  nlohmann::json best{{"command", "grid-search"},
                      {"model", o.model},
                      {"folds", o.folds},
                      {"seed", o.seed},
                      {"best_index", result.best_index},
                      {"mean_auc", winner.mean_auc},
                      {"std_auc", winner.std_auc},
                      {"spec", nlohmann::json::parse(mo::spec_json(result.best))}};
  write_text(o.best_out, best.dump(2) + "\n");
  if (!o.table_out.empty()) gr::save_grid_csv(o.table_out, result);

  std::printf("grid: %zu combinations, winner #%zu mean auc %.4f -> %s\n",
              result.table.size(), result.best_index, winner.mean_auc,
              o.best_out.c_str());
  return kExitOk;
}

// ------------------------------------------------------------------ evaluate

struct EvaluateOpts {
  std::string model, vectors, metrics_out, roc_out;
  double threshold = -1.0;
};

int run_evaluate(const EvaluateOpts& o) {
  auto model = mo::load_model(o.model);
  auto records = fe::load_vectors(o.vectors, model->dim());
  mo::FeatureMatrix X = to_matrix(records, model->dim());
  auto scores = mo::predict_scores(*model, X);
  double threshold = o.threshold >= 0.0 ? o.threshold : model->default_threshold();
  ev::MetricsReport report = ev::compute_metrics(X.labels, scores, threshold);

  nlohmann::json config{{"command", "evaluate"},
                        {"model", o.model},
                        {"vectors", o.vectors},
                        {"threshold", threshold},
                        {"model_kind", mo::to_string(model->kind())}};
  write_metrics(o.metrics_out, report, config);
  if (!o.roc_out.empty())
    ev::save_roc_csv(o.roc_out, ev::roc_auc(X.labels, scores).first);

  std::printf("auc %.4f accuracy %.4f f1 %.4f -> %s\n", report.auc, report.accuracy,
              report.f1, o.metrics_out.c_str());
  return kExitOk;
}

// --------------------------------------------------------------------- stats

struct StatsOpts {
  std::string input, stoplist;
  std::string stemmer = "light";
};

int run_stats(const StatsOpts& o) {
  co::LabeledDataset ds = co::load_dataset(o.input, co::format_from_path(o.input));
  ar::PreprocessConfig cfg = make_preprocess_config(o.stemmer, o.stoplist);
  co::DatasetStats stats = co::dataset_stats(ds, cfg);
  nlohmann::json j{{"n_records", stats.n_records},
                   {"n_positive", stats.n_positive},
                   {"n_negative", stats.n_negative},
                   {"positive_ratio", stats.positive_ratio},
                   {"unique_tokens", stats.unique_tokens}};
  std::printf("%s\n", j.dump(2).c_str());
  return kExitOk;
}

// -------------------------------------------------------------------- report

struct ReportOpts {
  std::vector<std::string> metrics;
};

int run_report(const ReportOpts& o) {
  std::printf("%-28s %8s %8s %9s %8s %8s\n", "metrics", "auc", "accuracy",
              "precision", "recall", "f1");
  for (const auto& path : o.metrics) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(slurp(path));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("malformed metrics file " + path + ": " + e.what());
    }
    nlohmann::json m = j.contains("metrics") ? j["metrics"] : j;
    ev::MetricsReport r = ev::metrics_from_json(m.dump());
    std::string name = std::filesystem::path(path).filename().string();
    std::printf("%-28s %8.4f %8.4f %9.4f %8.4f %8.4f\n", name.c_str(), r.auc,
                r.accuracy, r.precision, r.recall, r.f1);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tahqiq: Arabic social-media misinformation detection pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI-style config file");
  std::string dump_config;
  app.add_option("--dump-config", dump_config,
                 "Write the resolved options back out as a config file")
      ->configurable(false);

  PreprocessOpts pre;
  CLI::App* cmd_pre = app.add_subcommand("preprocess", "Clean, normalize, tokenize and stem a corpus");
  cmd_pre->configurable();
  cmd_pre->add_option("--input", pre.input, "Corpus JSONL/TSV")->required()->check(CLI::ExistingFile);
  cmd_pre->add_option("--output", pre.output, "Tokenized JSONL")->required();
  cmd_pre->add_option("--stoplist", pre.stoplist, "Stop list file (default: builtin)")->check(CLI::ExistingFile);
  cmd_pre->add_option("--stemmer", pre.stemmer, "light|none")->check(CLI::IsMember({"light", "none"}));

  EmbedOpts emb;
  CLI::App* cmd_emb = app.add_subcommand("embed-train", "Train CBOW or FastText word vectors");
  cmd_emb->configurable();
  cmd_emb->add_option("--input", emb.input, "Tokenized JSONL")->required()->check(CLI::ExistingFile);
  cmd_emb->add_option("--output", emb.output, "Word-vector text file")->required();
  cmd_emb->add_option("--mode", emb.mode, "cbow|fasttext")->check(CLI::IsMember({"cbow", "fasttext"}));
  cmd_emb->add_option("--dim", emb.cfg.dim, "Vector dimensionality");
  cmd_emb->add_option("--window", emb.cfg.window, "Context window radius");
  cmd_emb->add_option("--epochs", emb.cfg.epochs, "Training epochs (0: keep init)");
  cmd_emb->add_option("--min-count", emb.cfg.min_count, "Minimum corpus frequency");
  cmd_emb->add_option("--negatives", emb.cfg.negatives, "Negative samples per window");
  cmd_emb->add_option("--buckets", emb.cfg.buckets, "FastText hash buckets");
  cmd_emb->add_option("--subword-min", emb.cfg.subword_min, "Shortest subword n-gram");
  cmd_emb->add_option("--subword-max", emb.cfg.subword_max, "Longest subword n-gram");
  cmd_emb->add_option("--lr", emb.cfg.learning_rate, "Initial learning rate");
  cmd_emb->add_option("--min-lr", emb.cfg.min_learning_rate, "Final learning rate");
  cmd_emb->add_option("--batch", emb.cfg.batch, "Delta accumulation batch");
  cmd_emb->add_option("--workers", emb.cfg.workers, "Training threads");
  cmd_emb->add_option("--seed", emb.cfg.seed, "RNG seed");

  FeaturizeOpts fea;
  CLI::App* cmd_fea = app.add_subcommand("featurize", "Turn tokens into feature vectors");
  cmd_fea->configurable();
  cmd_fea->add_option("--tokens", fea.tokens, "Tokenized JSONL")->required()->check(CLI::ExistingFile);
  cmd_fea->add_option("--output", fea.output, "Vector TSV")->required();
  cmd_fea->add_option("--features", fea.features, "tfidf-uni|tfidf-ngram|cbow|fasttext")
      ->required()->check(CLI::IsMember({"tfidf-uni", "tfidf-ngram", "cbow", "fasttext"}));
  cmd_fea->add_option("--embeddings", fea.embeddings, "Word-vector file for cbow/fasttext")->check(CLI::ExistingFile);
  cmd_fea->add_option("--vocab-out", fea.vocab_out, "Write the fitted TF-IDF vocabulary");
  cmd_fea->add_option("--max-features", fea.tfidf.max_features, "Vocabulary cap");
  cmd_fea->add_option("--log-base", fea.log_base, "natural|base10")->check(CLI::IsMember({"natural", "base10"}));
  cmd_fea->add_flag("--l2", fea.tfidf.l2_normalize, "L2-normalize nonzero vectors");

  TrainOpts tra;
  CLI::App* cmd_tra = app.add_subcommand("train", "Split, featurize, train and evaluate");
  cmd_tra->configurable();
  cmd_tra->add_option("--tokens", tra.tokens, "Labeled tokenized JSONL")->required()->check(CLI::ExistingFile);
  cmd_tra->add_option("--model", tra.model, "nb|sgd|svm|rf|gbt|cnn")
      ->required()->check(CLI::IsMember({"nb", "sgd", "svm", "rf", "gbt", "cnn"}));
  cmd_tra->add_option("--features", tra.features, "tfidf-uni|tfidf-ngram|cbow|fasttext")
      ->check(CLI::IsMember({"tfidf-uni", "tfidf-ngram", "cbow", "fasttext"}));
  cmd_tra->add_option("--embeddings", tra.embeddings, "Word-vector file")->check(CLI::ExistingFile);
  cmd_tra->add_option("--params", tra.params, "Model spec JSON (cnn: config JSON)")->check(CLI::ExistingFile);
  cmd_tra->add_option("--outdir", tra.outdir, "Artifact directory")->required();
  cmd_tra->add_option("--split", tra.split, "Training fraction")->check(CLI::Range(0.05, 0.95));
  auto* seed_opt = cmd_tra->add_option("--seed", tra.seed, "RNG seed");
  cmd_tra->add_option("--threshold", tra.threshold, "Classification threshold");
  cmd_tra->add_option("--embed-init", tra.embed_init, "cnn: random|cbow|fasttext")
      ->check(CLI::IsMember({"random", "cbow", "fasttext"}));
  cmd_tra->add_option("--loss", tra.loss, "cnn: ce|auc")->check(CLI::IsMember({"ce", "auc"}));
  cmd_tra->add_option("--epochs", tra.cnn.epochs, "cnn: epochs (0: loss default)");
  cmd_tra->add_option("--batch", tra.cnn.batch, "cnn: minibatch size");
  cmd_tra->add_option("--lr", tra.cnn.lr, "cnn: learning rate");
  cmd_tra->add_option("--max-seq-len", tra.cnn.max_sequence_length, "cnn: padded length");
  cmd_tra->add_option("--embed-dim", tra.cnn.embed_dim, "cnn: embedding width");
  cmd_tra->add_option("--dropout", tra.cnn.dropout, "cnn: dropout rate");
  cmd_tra->add_option("--filters", tra.cnn.filters_per_kernel, "cnn: filters per kernel size");
  cmd_tra->add_option("--kernels", tra.kernels, "cnn: comma-separated kernel sizes");
  cmd_tra->add_option("--max-words", tra.max_words, "cnn: vocabulary cap (0: all)");
  cmd_tra->add_flag("--frozen-embeddings", tra.frozen, "cnn: do not update embeddings");

  GridOpts gri;
  CLI::App* cmd_gri = app.add_subcommand("grid-search", "Cross-validated hyperparameter sweep");
  cmd_gri->configurable();
  cmd_gri->add_option("--tokens", gri.tokens, "Labeled tokenized JSONL")->required()->check(CLI::ExistingFile);
  cmd_gri->add_option("--model", gri.model, "nb|sgd|svm|rf|gbt")
      ->required()->check(CLI::IsMember({"nb", "sgd", "svm", "rf", "gbt"}));
  cmd_gri->add_option("--features", gri.features, "tfidf-uni|tfidf-ngram|cbow|fasttext")
      ->required()->check(CLI::IsMember({"tfidf-uni", "tfidf-ngram", "cbow", "fasttext"}));
  cmd_gri->add_option("--embeddings", gri.embeddings, "Word-vector file")->check(CLI::ExistingFile);
  cmd_gri->add_option("--grid", gri.grid, "JSON: name -> value list")->required()->check(CLI::ExistingFile);
  cmd_gri->add_option("--best-out", gri.best_out, "Winning spec JSON")->required();
  cmd_gri->add_option("--table-out", gri.table_out, "Full sweep CSV");
  cmd_gri->add_option("--folds", gri.folds, "Cross-validation folds");
  cmd_gri->add_option("--seed", gri.seed, "Fold and model seed");

  EvaluateOpts eva;
  CLI::App* cmd_eva = app.add_subcommand("evaluate", "Score a saved model against labeled vectors");
  cmd_eva->configurable();
  cmd_eva->add_option("--model", eva.model, "Model JSON")->required()->check(CLI::ExistingFile);
  cmd_eva->add_option("--vectors", eva.vectors, "Vector TSV")->required()->check(CLI::ExistingFile);
  cmd_eva->add_option("--metrics-out", eva.metrics_out, "Metrics JSON")->required();
  cmd_eva->add_option("--roc-out", eva.roc_out, "ROC CSV");
  cmd_eva->add_option("--threshold", eva.threshold, "Classification threshold");

  StatsOpts sta;
  CLI::App* cmd_sta = app.add_subcommand("stats", "Print a JSON dataset summary");
  cmd_sta->configurable();
  cmd_sta->add_option("--input", sta.input, "Labeled corpus JSONL/TSV")->required()->check(CLI::ExistingFile);
  cmd_sta->add_option("--stoplist", sta.stoplist, "Stop list file")->check(CLI::ExistingFile);
  cmd_sta->add_option("--stemmer", sta.stemmer, "light|none")->check(CLI::IsMember({"light", "none"}));

  ReportOpts rep;
  CLI::App* cmd_rep = app.add_subcommand("report", "Tabulate one or more metrics files");
  cmd_rep->configurable();
  cmd_rep->add_option("--metrics", rep.metrics, "Metrics JSON files")
      ->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (!dump_config.empty())
      write_text(dump_config, app.config_to_str(false, true));
    tra.seed_set = seed_opt->count() > 0;

    if (cmd_pre->parsed()) return run_preprocess(pre);
    if (cmd_emb->parsed()) return run_embed_train(emb);
    if (cmd_fea->parsed()) return run_featurize(fea);
    if (cmd_tra->parsed()) return run_train(tra, *cmd_tra);
    if (cmd_gri->parsed()) return run_grid_search(gri);
    if (cmd_eva->parsed()) return run_evaluate(eva);
    if (cmd_sta->parsed()) return run_stats(sta);
    if (cmd_rep->parsed()) return run_report(rep);
    std::fprintf(stderr, "no subcommand selected\n");
    return kExitUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitInternal;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
}
