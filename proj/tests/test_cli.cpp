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

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "tahqiq/corpus.hpp"
#include "tahqiq/embeddings.hpp"
#include "tahqiq/rng.hpp"

// End-to-end runs of the installed binary; everything lives under one scratch
// directory that is rebuilt per process.

namespace {

namespace fs = std::filesystem;

const fs::path& scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "tahqiq_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path_of(const std::string& name) { return (scratch() / name).string(); }

int run_cli(const std::string& args) {
  std::string cmd = std::string(TAHQIQ_CLI_PATH) + " " + args + " > " +
                    path_of("stdout.txt") + " 2> " + path_of("stderr.txt");
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string captured_stdout() { return slurp(path_of("stdout.txt")); }
std::string captured_stderr() { return slurp(path_of("stderr.txt")); }

// Arabic corpus with disjoint class vocabularies, ~20% positive.
void write_corpus(const std::string& path, std::size_t n) {
  std::vector<std::string> pos = {"كورونا", "فيروس",  "لقاح",  "وباء",
                                  "عاجل",   "انتشار", "اصابة", "خطير"};
  std::vector<std::string> neg = {"مباراة", "فريق",  "هدف",   "ملعب",
                                  "لاعب",   "جمهور", "بطولة", "تدريب"};
  tahqiq::Rng rng(12);
  std::ofstream out(path);
  REQUIRE(out.good());
  for (std::size_t i = 0; i < n; ++i) {
    int label = i % 5 == 0 ? 1 : 0;
    const auto& pool = label == 1 ? pos : neg;
    std::string text;
    for (int t = 0; t < 8; ++t) {
      if (t > 0) text += ' ';
      text += pool[rng.index(pool.size())];
    }
    nlohmann::json j{{"id", "t" + std::to_string(i)}, {"text", text}, {"label", label}};
    out << j.dump() << '\n';
  }
}

struct Fixture {
  Fixture() {
    static bool prepared = false;
    if (prepared) return;
    write_corpus(path_of("corpus.jsonl"), 260);
    REQUIRE(run_cli("preprocess --input " + path_of("corpus.jsonl") + " --output " +
                    path_of("tokens.jsonl")) == 0);
    prepared = true;
  }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "preprocess writes tokens and reruns byte-identically") {
  std::string first = slurp(path_of("tokens.jsonl"));
  REQUIRE(run_cli("preprocess --input " + path_of("corpus.jsonl") + " --output " +
                  path_of("tokens2.jsonl")) == 0);
  CHECK(first == slurp(path_of("tokens2.jsonl")));

  auto records = tahqiq::corpus::load_tokens(path_of("tokens.jsonl"));
  REQUIRE(records.size() == 260);
  CHECK(records[0].id == "t0");
  CHECK(records[0].label == 1);
  CHECK_FALSE(records[0].tokens.empty());
}

TEST_CASE_FIXTURE(Fixture, "corrupt corpus line is cited with its number") {
  {
    std::ofstream out(path_of("bad.jsonl"));
    for (int i = 1; i <= 6; ++i)
      out << R"({"id":"r)" << i << R"(","text":"نص","label":0})" << '\n';
    out << "{{{ not json\n";
  }
  int code = run_cli("preprocess --input " + path_of("bad.jsonl") + " --output " +
                     path_of("bad_tokens.jsonl"));
  CHECK(code == 2);
  CHECK(captured_stderr().find("bad.jsonl:7:") != std::string::npos);
}

TEST_CASE_FIXTURE(Fixture, "usage errors exit 64") {
  CHECK(run_cli("train --tokens " + path_of("tokens.jsonl") +
                " --model xgboost --features tfidf-uni --outdir " +
                path_of("nope")) == 64);
  CHECK(run_cli("no-such-command") == 64);
  CHECK(run_cli("preprocess --input " + path_of("corpus.jsonl")) == 64);
  CHECK(run_cli("train --tokens " + path_of("tokens.jsonl") + " --model nb --outdir " +
                path_of("nope")) == 64);
  CHECK(run_cli("preprocess --input " + path_of("missing_file.jsonl") + " --output x") == 64);
  CHECK(run_cli("--help") == 0);
}

TEST_CASE_FIXTURE(Fixture, "stats prints a json summary") {
  REQUIRE(run_cli("stats --input " + path_of("corpus.jsonl")) == 0);
  auto j = nlohmann::json::parse(captured_stdout());
  CHECK(j.at("n_records").get<int>() == 260);
  CHECK(j.at("n_positive").get<int>() == 52);
  CHECK(j.at("n_negative").get<int>() == 208);
  CHECK(j.at("positive_ratio").get<double>() == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(j.at("unique_tokens").get<int>() > 0);
}

TEST_CASE_FIXTURE(Fixture, "embed-train with zero epochs emits the initialization") {
  std::string out = path_of("vec0.txt");
  REQUIRE(run_cli("embed-train --input " + path_of("tokens.jsonl") + " --output " + out +
                  " --mode cbow --dim 12 --min-count 1 --epochs 0 --seed 9") == 0);

  auto records = tahqiq::corpus::load_tokens(path_of("tokens.jsonl"));
  std::vector<std::vector<std::string>> lists;
  for (const auto& r : records) lists.push_back(r.tokens);
  tahqiq::embeddings::EmbedTrainConfig cfg;
  cfg.dim = 12;
  cfg.min_count = 1;
  cfg.epochs = 0;
  cfg.seed = 9;
  auto expected = tahqiq::embeddings::train_cbow(lists, cfg);

  auto loaded = tahqiq::embeddings::load_table(out);
  REQUIRE(loaded.size() == expected.size());
  CHECK(loaded.words == expected.words);
  for (std::size_t i = 0; i < expected.input_vectors.size(); ++i)
    CHECK(loaded.input_vectors[i] ==
          static_cast<double>(static_cast<float>(expected.input_vectors[i])));

  CHECK(fs::exists(out + ".meta.json"));
  auto meta = nlohmann::json::parse(slurp(out + ".meta.json"));
  CHECK(meta.at("config").at("seed").get<int>() == 9);
  CHECK(meta.at("config").at("dim").get<int>() == 12);
}

TEST_CASE_FIXTURE(Fixture, "train rerun produces byte-identical metrics") {
  std::string base = "train --tokens " + path_of("tokens.jsonl") +
                     " --model nb --features tfidf-uni --seed 3 --outdir ";
  REQUIRE(run_cli(base + path_of("run_a")) == 0);
  REQUIRE(run_cli(base + path_of("run_b")) == 0);
  CHECK(slurp(path_of("run_a/metrics.json")) == slurp(path_of("run_b/metrics.json")));

  auto doc = nlohmann::json::parse(slurp(path_of("run_a/metrics.json")));
  CHECK(doc.at("config").at("seed").get<int>() == 3);
  CHECK(doc.at("config").at("model").get<std::string>() == "nb");
  const auto& m = doc.at("metrics");
  for (const char* key : {"accuracy", "auc", "precision", "recall", "f1"})
    CHECK(m.contains(key));
  CHECK(m.at("auc").get<double>() > 0.95);

  CHECK(fs::exists(path_of("run_a/model.json")));
  std::string roc = slurp(path_of("run_a/roc.csv"));
  CHECK(roc.rfind("threshold,fpr,tpr", 0) == 0);
}

TEST_CASE_FIXTURE(Fixture, "config file round-trips a training run") {
  std::string flags = "train --tokens " + path_of("tokens.jsonl") +
                      " --model sgd --features tfidf-uni --seed 5 --outdir " +
                      path_of("run_flags");
  REQUIRE(run_cli("--dump-config " + path_of("run.ini") + " " + flags) == 0);

  std::string ini = slurp(path_of("run.ini"));
  CHECK(ini.find("[train]") != std::string::npos);
  // rerun from the dumped config, overriding only the output directory
  REQUIRE(run_cli("--config " + path_of("run.ini") + " train --outdir " +
                  path_of("run_conf")) == 0);
  auto a = nlohmann::json::parse(slurp(path_of("run_flags/metrics.json")));
  auto b = nlohmann::json::parse(slurp(path_of("run_conf/metrics.json")));
  CHECK(a.at("metrics") == b.at("metrics"));
  CHECK(b.at("config").at("seed").get<int>() == 5);
}

TEST_CASE_FIXTURE(Fixture, "grid-search single point returns that point") {
  {
    std::ofstream out(path_of("grid1.json"));
    out << R"({"alpha": [0.7]})" << '\n';
  }
  REQUIRE(run_cli("grid-search --tokens " + path_of("tokens.jsonl") +
                  " --model nb --features tfidf-uni --grid " + path_of("grid1.json") +
                  " --best-out " + path_of("best1.json") + " --table-out " +
                  path_of("grid1.csv") + " --seed 2") == 0);
  auto best = nlohmann::json::parse(slurp(path_of("best1.json")));
  CHECK(best.at("best_index").get<int>() == 0);
  CHECK(best.at("spec").at("params").at("alpha").get<double>() == 0.7);
  CHECK(best.at("spec").at("kind").get<std::string>() == "nb");

  std::string csv = slurp(path_of("grid1.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + 1 combination
}

TEST_CASE_FIXTURE(Fixture, "grid-search csv row count matches the product") {
  {
    std::ofstream out(path_of("grid4.json"));
    out << R"({"alpha": [0.3, 1.0], "fit_prior": [true, false]})" << '\n';
  }
  REQUIRE(run_cli("grid-search --tokens " + path_of("tokens.jsonl") +
                  " --model nb --features tfidf-uni --grid " + path_of("grid4.json") +
                  " --best-out " + path_of("best4.json") + " --table-out " +
                  path_of("grid4.csv") + " --seed 2") == 0);
  std::string csv = slurp(path_of("grid4.csv"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 2*2

  // deterministic rerun
  REQUIRE(run_cli("grid-search --tokens " + path_of("tokens.jsonl") +
                  " --model nb --features tfidf-uni --grid " + path_of("grid4.json") +
                  " --best-out " + path_of("best4b.json") + " --table-out " +
                  path_of("grid4b.csv") + " --seed 2") == 0);
  CHECK(slurp(path_of("best4.json")) == slurp(path_of("best4b.json")));
  CHECK(csv == slurp(path_of("grid4b.csv")));
}

TEST_CASE_FIXTURE(Fixture, "featurize evaluate report chain works on embeddings") {
  REQUIRE(run_cli("embed-train --input " + path_of("tokens.jsonl") + " --output " +
                  path_of("ft.txt") +
                  " --mode fasttext --dim 16 --min-count 1 --epochs 3 --buckets 2048"
                  " --seed 4") == 0);
  REQUIRE(run_cli("train --tokens " + path_of("tokens.jsonl") +
                  " --model rf --features fasttext --embeddings " + path_of("ft.txt") +
                  " --seed 6 --outdir " + path_of("run_rf")) == 0);
  REQUIRE(run_cli("featurize --tokens " + path_of("tokens.jsonl") + " --output " +
                  path_of("ft_vecs.tsv") + " --features fasttext --embeddings " +
                  path_of("ft.txt")) == 0);
  REQUIRE(run_cli("evaluate --model " + path_of("run_rf/model.json") + " --vectors " +
                  path_of("ft_vecs.tsv") + " --metrics-out " + path_of("eval.json") +
                  " --roc-out " + path_of("eval_roc.csv")) == 0);

  auto doc = nlohmann::json::parse(slurp(path_of("eval.json")));
  CHECK(doc.at("metrics").at("auc").get<double>() > 0.95);
  CHECK(doc.at("config").at("model_kind").get<std::string>() == "rf");

  REQUIRE(run_cli("report --metrics " + path_of("eval.json") + " " +
                  path_of("run_rf/metrics.json")) == 0);
  std::string table = captured_stdout();
  CHECK(table.find("auc") != std::string::npos);
  CHECK(table.find("eval.json") != std::string::npos);
  CHECK(table.find("metrics.json") != std::string::npos);

  // wrong feature kind for the embedding file is a data error
  CHECK(run_cli("featurize --tokens " + path_of("tokens.jsonl") + " --output " +
                path_of("bad_vecs.tsv") + " --features cbow --embeddings " +
                path_of("ft.txt")) == 2);
  // embeddings flag missing entirely is a usage error
  CHECK(run_cli("featurize --tokens " + path_of("tokens.jsonl") + " --output " +
                path_of("bad_vecs.tsv") + " --features cbow") == 64);
}

TEST_CASE_FIXTURE(Fixture, "cnn training runs end to end") {
  REQUIRE(run_cli("train --tokens " + path_of("tokens.jsonl") +
                  " --model cnn --embed-init random --epochs 6 --max-seq-len 8"
                  " --embed-dim 8 --filters 4 --kernels 2,3 --lr 0.01 --seed 8"
                  " --outdir " + path_of("run_cnn")) == 0);
  CHECK(fs::exists(path_of("run_cnn/model.bin")));
  CHECK(fs::exists(path_of("run_cnn/roc.csv")));

  std::string history = slurp(path_of("run_cnn/history.csv"));
  CHECK(history.rfind("epoch,train_loss,val_auc", 0) == 0);
  CHECK(std::count(history.begin(), history.end(), '\n') == 7);  // header + 6 epochs

  auto doc = nlohmann::json::parse(slurp(path_of("run_cnn/metrics.json")));
  CHECK(doc.at("config").at("cnn_config").at("epochs").get<int>() == 6);
  CHECK(doc.at("config").at("best_epoch").get<int>() >= 1);
  CHECK(doc.at("metrics").at("auc").get<double>() > 0.9);
}
