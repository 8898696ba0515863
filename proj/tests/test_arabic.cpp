#include "doctest.h"

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "tahqiq/arabic.hpp"
#include "tahqiq/errors.hpp"
#include "tahqiq/rng.hpp"
#include "tahqiq/utf8.hpp"

namespace ar = tahqiq::arabic;
namespace u8 = tahqiq::utf8;

namespace {

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

// Independent reference splitter used by the round-trip property.
std::vector<std::string> reference_split(const std::string& s) {
  auto cps = u8::decode(s);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && ar::is_space(cps[i])) ++i;
    std::size_t j = i;
    while (j < cps.size() && !ar::is_space(cps[j])) ++j;
    if (j > i) {
      std::string tok;
      for (std::size_t k = i; k < j; ++k) u8::append(tok, cps[k]);
      out.push_back(tok);
    }
    i = j;
  }
  return out;
}

// Random tweet-like strings mixing Arabic letters, elongation, diacritics,
// Latin junk, URLs, digits and punctuation.
std::string random_noisy_text(tahqiq::Rng& rng) {
  static const std::vector<char32_t> letters = {
      0x0627, 0x0628, 0x062A, 0x062B, 0x062C, 0x062D, 0x062E, 0x062F, 0x0631, 0x0632,
      0x0633, 0x0634, 0x0635, 0x0636, 0x0637, 0x0639, 0x063A, 0x0641, 0x0642, 0x0643,
      0x0644, 0x0645, 0x0646, 0x0647, 0x0648, 0x064A, 0x0623, 0x0625, 0x0622, 0x0626,
      0x0649, 0x0629, 0x0624, 0x06AF};
  static const std::vector<char32_t> diacritics = {0x064B, 0x064C, 0x064E, 0x0650, 0x0651, 0x0652};
  static const std::vector<std::string> junk = {"!!", "#", "%", "&", "@", "19", "COVID", "..", "؟"};

  std::string out;
  std::size_t words = 1 + rng.index(8);
  for (std::size_t w = 0; w < words; ++w) {
    if (w) out.push_back(' ');
    double kind = rng.uniform();
    if (kind < 0.1) {
      out += "https://t.co/";
      out.push_back(static_cast<char>('a' + rng.index(26)));
      continue;
    }
    if (kind < 0.15) {
      out += junk[rng.index(junk.size())];
      continue;
    }
    std::size_t len = 2 + rng.index(6);
    for (std::size_t i = 0; i < len; ++i) {
      char32_t c = letters[rng.index(letters.size())];
      std::size_t repeat = rng.uniform() < 0.1 ? 3 + rng.index(3) : 1;
      for (std::size_t r = 0; r < repeat; ++r) u8::append(out, c);
      if (rng.uniform() < 0.15) u8::append(out, diacritics[rng.index(diacritics.size())]);
    }
    if (rng.uniform() < 0.2) out += junk[rng.index(junk.size())];
  }
  return out;
}

}  // namespace

TEST_CASE("clean: urls, tags and non-arabic codepoints are removed") {
  CHECK(ar::clean("كورونا https://t.co/x #وباء") == "كورونا وباء");
  CHECK(ar::clean("") == "");
  CHECK(ar::clean("COVID19") == "");
  CHECK(ar::clean("عاجل: www.news.com الخبر") == "عاجل الخبر");
  CHECK(ar::clean("HTTP://X.CO مرض") == "مرض");
  CHECK(ar::clean("مرضCOVID") == "مرض");
  CHECK(ar::clean("  فيروس   كورونا  ") == "فيروس كورونا");
  CHECK(ar::clean("2020 19") == "");
}

TEST_CASE("clean: diacritics and tatweel are stripped") {
  // بِسْمِ with kasra/sukun marks reduces to بسم.
  std::string marked = "بِسْمِ";
  CHECK(ar::clean(marked) == "بسم");
  // tatweel elongation is not a letter
  CHECK(ar::clean("مــرض") == "مرض");
}

TEST_CASE("clean: output never contains forbidden classes (property)") {
  tahqiq::Rng rng(2211);
  for (int iter = 0; iter < 500; ++iter) {
    std::string s = random_noisy_text(rng);
    std::string c = ar::clean(s);
    CHECK(c.find('#') == std::string::npos);
    CHECK(c.find('%') == std::string::npos);
    CHECK(c.find('&') == std::string::npos);
    CHECK(c.find('@') == std::string::npos);
    CHECK(c.find("http") == std::string::npos);
    for (char32_t cp : u8::decode(c)) {
      bool ok = ar::is_arabic_letter(cp) || cp == U' ';
      CHECK(ok);
      CHECK_FALSE((cp >= 0x064B && cp <= 0x065F));
    }
  }
}

TEST_CASE("normalize: paper replacement examples") {
  CHECK(ar::normalize("عاااااجل") == "عاجل");
  CHECK(ar::normalize("مدرسة") == "مدرسه");
  // alef variants fold to bare alef
  CHECK(ar::normalize("أحمد") == "احمد");
  CHECK(ar::normalize("إلى") == "الي");
  CHECK(ar::normalize("آمل") == "امل");
  CHECK(ar::normalize("مئة") == "ماه");
  CHECK(ar::normalize("سؤال") == "سوال");
  CHECK(ar::normalize("گروب") == "كروب");
}

TEST_CASE("normalize: repeat collapsing respects the threshold") {
  // double letters survive, triples collapse
  CHECK(ar::normalize("مرر") == "مرر");
  CHECK(ar::normalize("مررر") == "مر");
  ar::NormalizationRules r2 = ar::NormalizationRules::defaults();
  r2.repeat_threshold = 2;
  CHECK(ar::normalize("مرر", r2) == "مر");
}

TEST_CASE("normalize: idempotent on random noisy strings (property)") {
  tahqiq::Rng rng(909);
  for (int iter = 0; iter < 500; ++iter) {
    std::string s = random_noisy_text(rng);
    std::string once = ar::normalize(s);
    CHECK(ar::normalize(once) == once);
    // mapping can create runs; collapse must still leave a fixpoint
    std::string cleaned = ar::clean(s);
    std::string n1 = ar::normalize(cleaned);
    CHECK(ar::normalize(n1) == n1);
  }
}

TEST_CASE("tokenize: whitespace split") {
  CHECK(ar::tokenize("غسل اليدين") == std::vector<std::string>{"غسل", "اليدين"});
  CHECK(ar::tokenize("  ") == std::vector<std::string>{});
  CHECK(ar::tokenize("") == std::vector<std::string>{});
  CHECK(ar::tokenize("a\tb\nc") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("tokenize: join/split round trip matches a reference splitter (property)") {
  tahqiq::Rng rng(31337);
  for (int iter = 0; iter < 1000; ++iter) {
    std::string s = random_noisy_text(rng);
    auto toks = ar::tokenize(s);
    CHECK(toks == reference_split(s));
    auto again = ar::tokenize(join(toks));
    CHECK(again == toks);
  }
}

TEST_CASE("remove_stopwords: listed members drop, order preserved") {
  ar::StopList one;
  one.words.insert("في");
  std::vector<std::string> in = {"الفيروس", "في", "الصين"};
  CHECK(ar::remove_stopwords(in, one) == std::vector<std::string>{"الفيروس", "الصين"});

  ar::StopList empty;
  CHECK(ar::remove_stopwords(in, empty) == in);

  ar::StopList all;
  for (const auto& t : in) all.words.insert(t);
  CHECK(ar::remove_stopwords(in, all).empty());
}

TEST_CASE("stem: light stemmer strips documented affixes") {
  CHECK(ar::stem_token("والمعقمات", ar::Stemmer::light) == "معقم");
  // article + plural
  CHECK(ar::stem_token("الفيروسات", ar::Stemmer::light) == "فيروس");
  // keep-original when stripping would go below three codepoints
  CHECK(ar::stem_token("في", ar::Stemmer::light) == "في");
  CHECK(ar::stem_token("ما", ar::Stemmer::light) == "ما");
  // no-op stemmer
  CHECK(ar::stem_token("والمعقمات", ar::Stemmer::none) == "والمعقمات");
  // iterated passes: conjunction, then suffix layers
  CHECK(ar::stem_token("وبياناتها",
                       ar::Stemmer::light) == "بيان");
}

TEST_CASE("stem: idempotent on random tokens (property)") {
  tahqiq::Rng rng(444);
  for (int iter = 0; iter < 2000; ++iter) {
    std::string word;
    std::size_t len = 1 + rng.index(9);
    static const std::vector<char32_t> letters = {0x0627, 0x0628, 0x062A, 0x0646, 0x0647,
                                                  0x0648, 0x064A, 0x0644, 0x0645, 0x0642};
    for (std::size_t i = 0; i < len; ++i) u8::append(word, letters[rng.index(letters.size())]);
    std::string s1 = ar::stem_token(word, ar::Stemmer::light);
    CHECK(ar::stem_token(s1, ar::Stemmer::light) == s1);
    CHECK_FALSE(s1.empty());
  }
}

TEST_CASE("preprocess: full pipeline on a covid-style tweet") {
  auto toks = ar::preprocess("تناول الثوم يمنع كورونا!! https://x.co");
  CHECK(toks == std::vector<std::string>{"تناول", "ثوم", "يمنع", "كورونا"});
  CHECK(ar::preprocess("").empty());
  CHECK(ar::preprocess("https://t.co/abc #COVID @user").empty());
}

TEST_CASE("preprocess: stop words vanish even when created by stemming") {
  // "وإلى" cleans/normalizes to "والي", stems to "الي" which is a stop word.
  auto toks = ar::preprocess("وإلى العمل");
  for (const auto& t : toks) CHECK(t != "الي");
  CHECK(toks == std::vector<std::string>{"عمل"});
}

TEST_CASE("preprocess: fixpoint under re-preprocessing (property)") {
  tahqiq::Rng rng(777);
  const ar::PreprocessConfig cfg;
  for (int iter = 0; iter < 300; ++iter) {
    std::string s = random_noisy_text(rng);
    auto once = ar::preprocess(s, cfg);
    auto twice = ar::preprocess(join(once), cfg);
    CHECK(twice == once);
  }
}

TEST_CASE("preprocess: output tokens are arabic, non-stop, normalized (property)") {
  tahqiq::Rng rng(555);
  const ar::PreprocessConfig cfg;
  for (int iter = 0; iter < 300; ++iter) {
    auto toks = ar::preprocess(random_noisy_text(rng), cfg);
    for (const auto& t : toks) {
      CHECK_FALSE(t.empty());
      CHECK_FALSE(cfg.stops.contains(t));
      bool any_arabic = false;
      for (char32_t cp : u8::decode(t)) any_arabic = any_arabic || ar::is_arabic_letter(cp);
      CHECK(any_arabic);
      CHECK(ar::normalize(t, cfg.rules) == t);
    }
  }
}

TEST_CASE("stop list: entries are normalization fixpoints and match the data file") {
  ar::StopList builtin = ar::StopList::builtin();
  CHECK(builtin.words.size() >= 100);
  for (const auto& w : builtin.words) {
    CHECK(ar::normalize(w) == w);
    for (char32_t cp : u8::decode(w)) CHECK(ar::is_arabic_letter(cp));
  }

  ar::StopList from_file = ar::StopList::load(std::string(TAHQIQ_DATA_DIR) + "/stopwords_ar.txt");
  CHECK(from_file.words == builtin.words);
}

TEST_CASE("stop list: loading a missing file raises a data error") {
  CHECK_THROWS_AS(ar::StopList::load("/nonexistent/stopwords.txt"), tahqiq::DataError);
}

TEST_CASE("affix tables: data files mirror the built-in tables") {
  auto read_lines = [](const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::u32string> out;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto cps = u8::decode(line);
      out.emplace_back(cps.begin(), cps.end());
    }
    return out;
  };
  CHECK(read_lines(std::string(TAHQIQ_DATA_DIR) + "/stem_prefixes.txt") == ar::stem_prefixes());
  CHECK(read_lines(std::string(TAHQIQ_DATA_DIR) + "/stem_suffixes.txt") == ar::stem_suffixes());
}
