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
#include <string>
#include <string_view>
#include <vector>

namespace tahqiq::utf8 {

// Decodes UTF-8 into codepoints. Invalid byte sequences decode to U+FFFD,
// one replacement per rejected byte.
std::vector<char32_t> decode(std::string_view s);

void append(std::string& out, char32_t cp);

std::string encode(const std::vector<char32_t>& cps);

}  // namespace tahqiq::utf8
