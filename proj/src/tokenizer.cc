// Copyright 2026 The MSTemp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mstemp/tokenizer.h"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <array>

namespace mstemp {
namespace {

struct CodePoint {
  UChar32 value;
  std::size_t begin;
  std::size_t end;
};

std::vector<CodePoint> Decode(std::string_view s) {
  std::vector<CodePoint> out;
  int32_t i = 0;
  const int32_t n = static_cast<int32_t>(s.size());
  while (i < n) {
    int32_t start = i;
    UChar32 c;
    U8_NEXT(s.data(), i, n, c);
    // Invalid bytes become standalone tokens; they still occupy their span.
    out.push_back({c < 0 ? 0xFFFD : c, static_cast<std::size_t>(start),
                   static_cast<std::size_t>(i)});
  }
  return out;
}

bool IsWordChar(UChar32 c) {
  return u_isalnum(c) || (U_GET_GC_MASK(c) & U_GC_M_MASK) != 0;
}

bool IsJoiner(UChar32 c) { return c == '\'' || c == 0x2019 || c == '-'; }

bool IsApostrophe(UChar32 c) { return c == '\'' || c == 0x2019; }

bool IsSpace(UChar32 c) { return u_isUWhiteSpace(c); }

// Returns the code-point index where a trailing clitic starts inside
// cps[first, last), or `last` when there is none.
std::size_t CliticStart(const std::vector<CodePoint>& cps, std::size_t first,
                        std::size_t last) {
  auto lower_ascii = [&](std::size_t i) -> UChar32 {
    UChar32 c = cps[i].value;
    return (c >= 'A' && c <= 'Z') ? c + 32 : c;
  };
  static constexpr std::array<std::string_view, 6> kClitics = {
      "s", "re", "ve", "ll", "d", "m"};
  for (std::string_view tail : kClitics) {
    std::size_t len = tail.size() + 1;
    if (last - first <= len) continue;
    std::size_t apos = last - len;
    if (!IsApostrophe(cps[apos].value)) continue;
    bool match = true;
    for (std::size_t k = 0; k < tail.size(); ++k) {
      if (lower_ascii(apos + 1 + k) != static_cast<UChar32>(tail[k])) {
        match = false;
        break;
      }
    }
    if (match) return apos;
  }
  // n't
  if (last - first > 3 && IsApostrophe(cps[last - 2].value) &&
      lower_ascii(last - 1) == 't' && lower_ascii(last - 3) == 'n') {
    return last - 3;
  }
  return last;
}

}  // namespace

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<CodePoint> cps = Decode(text);
  std::vector<Token> tokens;
  auto emit = [&](std::size_t first, std::size_t last) {
    std::size_t b = cps[first].begin;
    std::size_t e = cps[last - 1].end;
    tokens.push_back(Token{std::string(text.substr(b, e - b)), b, e});
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    UChar32 c = cps[i].value;
    if (IsSpace(c)) {
      ++i;
      continue;
    }
    if (!IsWordChar(c)) {
      emit(i, i + 1);
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < cps.size()) {
      if (IsWordChar(cps[j].value)) {
        ++j;
      } else if (IsJoiner(cps[j].value) && j + 1 < cps.size() &&
                 IsWordChar(cps[j + 1].value)) {
        j += 2;
      } else {
        break;
      }
    }
    std::size_t split = CliticStart(cps, i, j);
    emit(i, split);
    if (split != j) emit(split, j);
    i = j;
  }
  return tokens;
}

bool IsWordToken(std::string_view token) {
  int32_t i = 0;
  const int32_t n = static_cast<int32_t>(token.size());
  while (i < n) {
    UChar32 c;
    U8_NEXT(token.data(), i, n, c);
    if (c >= 0 && u_isalnum(c)) return true;
  }
  return false;
}

}  // namespace mstemp
