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

// Rule-based part-of-speech tagger over a coarse tagset. Only word class
// matters downstream (which tokens may become slots), so the tagger is a
// lexicon lookup with capitalization and suffix fallbacks rather than a
// statistical model.

#ifndef MSTEMP_TAGGER_H_
#define MSTEMP_TAGGER_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mstemp/tokenizer.h"

namespace mstemp {

enum class PosTag {
  kNoun,
  kProperNoun,
  kPronoun,
  kVerb,
  kAdjective,
  kAdverb,
  kDeterminer,
  kPreposition,
  kOther,
};

std::string_view PosTagName(PosTag t);
std::optional<PosTag> ParsePosTag(std::string_view name);

struct TaggedToken {
  std::string text;
  PosTag tag = PosTag::kOther;
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const TaggedToken&) const = default;
};

// "word<TAB>tag" file; '#' starts a comment line.
class TagLexicon {
 public:
  TagLexicon() = default;

  static TagLexicon Load(const std::filesystem::path& path);
  // data/tag_lexicon.tsv from the installed data directory, loaded once.
  static const TagLexicon& Default();

  void Add(std::string word, PosTag tag);
  std::optional<PosTag> Find(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, PosTag> entries_;
};

std::vector<TaggedToken> PosTagTokens(const std::vector<Token>& tokens,
                                      const TagLexicon& lexicon);

// Root for bundled data files: $MSTEMP_DATA_DIR if set, else the source tree
// the library was built from.
std::filesystem::path DataDir();

}  // namespace mstemp

#endif  // MSTEMP_TAGGER_H_
