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

#include "tahqiq/arabic.hpp"

#include <fstream>

#include "tahqiq/errors.hpp"
#include "tahqiq/utf8.hpp"

namespace tahqiq::arabic {

namespace {

// Built-in stop list, already in normalized form (the unit tests assert the
// fixpoint property for every entry). Mirrors data/stopwords_ar.txt.
const char* const kStopWords[] = {
    // Prepositions and spatial/temporal particles.
    "في", "من", "عن", "مع", "علي", "الي", "حتي", "منذ", "خلال", "عبر",
    "ضمن", "حسب", "دون", "بدون", "فوق", "تحت", "امام", "خلف", "بين", "حول",
    "عند", "نحو", "لدي", "ضد", "قبل", "بعد",
    // Pronouns and demonstratives.
    "هو", "هي", "هم", "هن", "هما", "انا", "انت", "انتم", "نحن", "هذا",
    "هذه", "ذلك", "تلك", "هولاء", "هنا", "هناك",
    // Relatives and interrogatives.
    "الذي", "التي", "الذين", "ما", "ماذا", "لماذا", "متي", "اين", "كيف",
    "كم", "هل", "اي",
    // Conjunctions and particles.
    "و", "او", "ثم", "بل", "لكن", "لان", "لذلك", "اذا", "اذ", "ان",
    "لا", "لم", "لن", "لو", "قد", "لقد", "سوف", "كما", "مثل", "حيث",
    "بينما", "حينما", "حين", "عندما", "ايضا", "فقط", "الا", "اما", "نعم", "يا",
    // Copulas and light verbs.
    "كان", "كانت", "كانوا", "يكون", "تكون", "كنت", "كنا", "ليس", "ليست",
    "اصبح", "يوجد", "توجد", "تم", "يتم", "يمكن", "يجب",
    // Quantifiers and hedges.
    "كل", "بعض", "غير", "نفس", "ذات", "احد", "احدي", "عده", "عدم", "جدا",
    "ابدا", "ربما",
    // Fused pronoun forms.
    "فيه", "فيها", "منه", "منها", "عليه", "عليها", "اليه", "اليها", "له", "لها",
    "لهم", "لنا", "لي", "به", "بها", "بهم", "معه", "معها", "عنه", "عنها",
    "لديه", "لديها",
    // Misc.
    "هكذا", "الان", "انه", "انها", "انهم",
};

// Affix tables for the light stemmer, matched in listed order (longest
// first). Mirrors data/stem_prefixes.txt and data/stem_suffixes.txt.
const std::vector<std::u32string>& prefixes() {
  static const std::vector<std::u32string> kPrefixes = {
      U"وال",  // wal
      U"بال",  // bal
      U"كال",  // kal
      U"فال",  // fal
      U"ال",        // al
      U"و",              // wa
  };
  return kPrefixes;
}

const std::vector<std::u32string>& suffixes() {
  static const std::vector<std::u32string> kSuffixes = {
      U"ها",  // -ha
      U"ان",  // -an
      U"ات",  // -at
      U"ون",  // -un
      U"ين",  // -in
      U"يه",  // -yh
      U"ية",  // -ya (teh marbuta form)
      U"ه",        // -h
      U"ة",        // teh marbuta
      U"ي",        // -y
  };
  return kSuffixes;
}

constexpr std::size_t kMinStemResidual = 3;

bool starts_with_url(const std::vector<char32_t>& cps, std::size_t i) {
  auto lower = [](char32_t c) { return (c >= U'A' && c <= U'Z') ? c + 32 : c; };
  if (i + 4 > cps.size()) return false;
  char32_t a = lower(cps[i]), b = lower(cps[i + 1]), c = lower(cps[i + 2]);
  char32_t d = cps[i + 3];
  if (a == U'h' && b == U't' && c == U't' && lower(d) == U'p') return true;
  if (a == U'w' && b == U'w' && c == U'w' && d == U'.') return true;
  return false;
}

}  // namespace

bool is_arabic_letter(char32_t cp) {
  if (cp >= 0x0621 && cp <= 0x063A) return true;
  if (cp >= 0x0641 && cp <= 0x064A) return true;
  if (cp >= 0x0671 && cp <= 0x06D3) return true;
  return cp == 0x06D5;
}

bool is_space(char32_t cp) {
  switch (cp) {
    case 0x09:
    case 0x0A:
    case 0x0B:
    case 0x0C:
    case 0x0D:
    case 0x20:
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

NormalizationRules NormalizationRules::defaults() {
  NormalizationRules r;
  r.char_map = {
      {0x0623, 0x0627},  // alef with hamza above -> alef
      {0x0625, 0x0627},  // alef with hamza below -> alef
      {0x0622, 0x0627},  // alef with madda -> alef
      {0x0626, 0x0627},  // yeh with hamza -> alef
      {0x0649, 0x064A},  // alef maqsura -> yeh
      {0x0629, 0x0647},  // teh marbuta -> heh
      {0x0624, 0x0648},  // waw with hamza -> waw
      {0x06AF, 0x0643},  // gaf -> kaf
  };
  r.repeat_threshold = 3;
  return r;
}

StopList StopList::builtin() {
  StopList s;
  for (const char* w : kStopWords) s.words.insert(w);
  return s;
}

StopList StopList::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stop list: " + path);
  StopList s;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) s.words.insert(line);
  }
  return s;
}

std::string clean(std::string_view text) {
  const auto cps = utf8::decode(text);
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  bool emitted = false;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (starts_with_url(cps, i)) {
      while (i < cps.size() && !is_space(cps[i])) ++i;
      continue;
    }
    char32_t c = cps[i++];
    if (is_space(c)) {
      pending_space = emitted;
    } else if (is_arabic_letter(c)) {
      if (pending_space) {
        out.push_back(' ');
        pending_space = false;
      }
      utf8::append(out, c);
      emitted = true;
    }
  }
  return out;
}

std::string normalize(std::string_view text, const NormalizationRules& rules) {
  auto cps = utf8::decode(text);
  for (auto& c : cps) {
    auto it = rules.char_map.find(c);
    if (it != rules.char_map.end()) c = it->second;
  }
  const std::size_t threshold =
      rules.repeat_threshold < 2 ? 2 : static_cast<std::size_t>(rules.repeat_threshold);
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < cps.size()) {
    std::size_t j = i;
    while (j < cps.size() && cps[j] == cps[i]) ++j;
    const std::size_t emit = (j - i >= threshold) ? 1 : j - i;
    for (std::size_t k = 0; k < emit; ++k) utf8::append(out, cps[i]);
    i = j;
  }
  return out;
}

std::string normalize(std::string_view text) {
  static const NormalizationRules kDefaults = NormalizationRules::defaults();
  return normalize(text, kDefaults);
}

std::vector<std::string> tokenize(std::string_view text) {
  const auto cps = utf8::decode(text);
  std::vector<std::string> tokens;
  std::string cur;
  for (char32_t c : cps) {
    if (is_space(c)) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      utf8::append(cur, c);
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopList& stops) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stops.contains(t)) out.push_back(t);
  }
  return out;
}

std::string stem_token(const std::string& token, Stemmer stemmer) {
  if (stemmer == Stemmer::none) return token;
  const auto decoded = utf8::decode(token);
  std::u32string w(decoded.begin(), decoded.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& p : prefixes()) {
      if (w.size() >= p.size() + kMinStemResidual && w.compare(0, p.size(), p) == 0) {
        w.erase(0, p.size());
        changed = true;
        break;
      }
    }
    for (const auto& s : suffixes()) {
      if (w.size() >= s.size() + kMinStemResidual &&
          w.compare(w.size() - s.size(), s.size(), s) == 0) {
        w.erase(w.size() - s.size());
        changed = true;
        break;
      }
    }
  }
  std::string out;
  for (char32_t c : w) utf8::append(out, c);
  return out;
}

std::vector<std::string> stem(const std::vector<std::string>& tokens, Stemmer stemmer) {
  if (stemmer == Stemmer::none) return tokens;
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(stem_token(t, stemmer));
  return out;
}

std::vector<std::string> preprocess(std::string_view text, const PreprocessConfig& config) {
  auto tokens = tokenize(normalize(clean(text), config.rules));
  tokens = remove_stopwords(tokens, config.stops);
  tokens = stem(tokens, config.stemmer);
  return remove_stopwords(tokens, config.stops);
}

std::vector<std::string> preprocess(std::string_view text) {
  static const PreprocessConfig kDefaults;
  return preprocess(text, kDefaults);
}

const std::vector<std::u32string>& stem_prefixes() { return prefixes(); }
const std::vector<std::u32string>& stem_suffixes() { return suffixes(); }

}  // namespace tahqiq::arabic
