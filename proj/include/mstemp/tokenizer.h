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

// Lossless whitespace-and-punctuation tokenizer.
//
// Rules, applied left to right over Unicode code points:
//
//   input                       tokens
//   -------------------------   ------------------------
//   whitespace                  (separator, never part of a token)
//   letters/digits/marks run    one word token
//   ' ’ or - between two word   kept inside the word ("rock'n'roll",
//     characters                  "well-known")
//   word ending in 's 're 've   split before the apostrophe
//     'll 'd 'm                   ("Bob's" -> "Bob" "'s")
//   word ending in n't          split before the n ("don't" -> "do" "n't")
//   any other code point        a token of its own ("." "," "!" "\"")
//
// Every token carries its byte span; the gaps between spans contain only
// whitespace, so the source is recoverable from tokens plus gaps.

#ifndef MSTEMP_TOKENIZER_H_
#define MSTEMP_TOKENIZER_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mstemp {

struct Token {
  std::string text;
  std::size_t begin = 0;  // byte offset, inclusive
  std::size_t end = 0;    // byte offset, exclusive

  bool operator==(const Token&) const = default;
};

std::vector<Token> Tokenize(std::string_view text);

// True when the token contains at least one letter or digit.
bool IsWordToken(std::string_view token);

}  // namespace mstemp

#endif  // MSTEMP_TOKENIZER_H_
