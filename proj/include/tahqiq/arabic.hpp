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

#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace tahqiq::arabic {

// Orthographic normalization: character folding plus collapsing of long
// character runs (elongation like "عاااااجل"). The default map folds hamza
// carriers and common variant letters:
//   alef-with-hamza-above/below, alef-madda -> bare alef
//   yeh-with-hamza -> bare alef
//   alef-maqsura -> yeh
//   teh-marbuta -> heh
//   waw-with-hamza -> waw
//   gaf -> kaf
struct NormalizationRules {
  std::unordered_map<char32_t, char32_t> char_map;
  int repeat_threshold = 3;

  static NormalizationRules defaults();
};

enum class Stemmer { none, light };

struct StopList {
  std::unordered_set<std::string> words;

  static StopList builtin();
  static StopList load(const std::string& path);

  bool contains(const std::string& w) const { return words.count(w) > 0; }
};

struct PreprocessConfig {
  NormalizationRules rules = NormalizationRules::defaults();
  Stemmer stemmer = Stemmer::light;
  StopList stops = StopList::builtin();
};

bool is_arabic_letter(char32_t cp);
bool is_space(char32_t cp);

// Removes URLs (substrings starting "http" or "www.", up to the next
// whitespace), deletes every codepoint that is not an Arabic letter or
// whitespace, collapses whitespace runs to single spaces and trims the ends.
// Tokens left with no Arabic letter vanish entirely.
std::string clean(std::string_view text);

std::string normalize(std::string_view text, const NormalizationRules& rules);
std::string normalize(std::string_view text);

std::vector<std::string> tokenize(std::string_view text);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopList& stops);

// Light stemmer: per pass, strips at most one prefix and one suffix from the
// fixed affix tables, never leaving fewer than three codepoints; passes repeat
// until the token stops changing, which makes stemming idempotent.
std::string stem_token(const std::string& token, Stemmer stemmer);
std::vector<std::string> stem(const std::vector<std::string>& tokens, Stemmer stemmer);

// clean -> normalize -> tokenize -> remove_stopwords -> stem, followed by a
// second stop filter because a stem can itself be a stop word and output
// tokens must never appear in the active stop list.
std::vector<std::string> preprocess(std::string_view text, const PreprocessConfig& config);
std::vector<std::string> preprocess(std::string_view text);

const std::vector<std::u32string>& stem_prefixes();
const std::vector<std::u32string>& stem_suffixes();

}  // namespace tahqiq::arabic
