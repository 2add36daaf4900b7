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

#include "mstemp/tagger.h"

#include <array>
#include <cstdlib>
#include <utility>

#include "mstemp/errors.h"
#include "mstemp/text_util.h"

namespace mstemp {
namespace {

constexpr std::array<std::pair<PosTag, std::string_view>, 9> kTagNames = {{
    {PosTag::kNoun, "noun"},
    {PosTag::kProperNoun, "proper-noun"},
    {PosTag::kPronoun, "pronoun"},
    {PosTag::kVerb, "verb"},
    {PosTag::kAdjective, "adjective"},
    {PosTag::kAdverb, "adverb"},
    {PosTag::kDeterminer, "determiner"},
    {PosTag::kPreposition, "preposition"},
    {PosTag::kOther, "other"},
}};

struct SuffixRule {
  std::string_view suffix;
  PosTag tag;
};

// First match wins; a rule fires only when at least two characters remain
// in front of the suffix.
constexpr std::array<SuffixRule, 22> kSuffixRules = {{
    {"ly", PosTag::kAdverb},       {"ing", PosTag::kVerb},
    {"ed", PosTag::kVerb},         {"ize", PosTag::kVerb},
    {"ise", PosTag::kVerb},        {"ous", PosTag::kAdjective},
    {"ful", PosTag::kAdjective},   {"less", PosTag::kAdjective},
    {"able", PosTag::kAdjective},  {"ible", PosTag::kAdjective},
    {"ive", PosTag::kAdjective},   {"ish", PosTag::kAdjective},
    {"ic", PosTag::kAdjective},    {"al", PosTag::kAdjective},
    {"ness", PosTag::kNoun},       {"tion", PosTag::kNoun},
    {"sion", PosTag::kNoun},       {"ment", PosTag::kNoun},
    {"ity", PosTag::kNoun},        {"ism", PosTag::kNoun},
    {"ist", PosTag::kNoun},        {"er", PosTag::kNoun},
}};

std::optional<PosTag> CliticTag(std::string_view lower) {
  if (lower == "'s" || lower == "’s") return PosTag::kOther;
  if (lower == "n't" || lower == "n’t") return PosTag::kAdverb;
  if (lower.size() >= 2 && (lower[0] == '\'' || lower.starts_with("’"))) {
    return PosTag::kVerb;  // 'm 're 've 'll 'd
  }
  return std::nullopt;
}

PosTag SuffixTag(std::string_view lower) {
  for (const SuffixRule& r : kSuffixRules) {
    if (lower.size() >= r.suffix.size() + 2 && lower.ends_with(r.suffix)) {
      return r.tag;
    }
  }
  return PosTag::kNoun;
}

bool IsClosedClass(PosTag t) {
  return t == PosTag::kPronoun || t == PosTag::kDeterminer ||
         t == PosTag::kPreposition;
}

bool EndsSentence(std::string_view token) {
  return token == "." || token == "!" || token == "?";
}

}  // namespace

std::string_view PosTagName(PosTag t) {
  for (const auto& [tag, name] : kTagNames) {
    if (tag == t) return name;
  }
  return "other";
}

std::optional<PosTag> ParsePosTag(std::string_view name) {
  for (const auto& [tag, n] : kTagNames) {
    if (n == name) return tag;
  }
  return std::nullopt;
}

TagLexicon TagLexicon::Load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("tag lexicon not found: " + path.string());
  }
  TagLexicon lex;
  std::vector<std::string> lines = SplitLines(ReadFile(path));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (line.empty() || line.front() == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw SchemaError(path.string() + ":" + std::to_string(i + 1) +
                        ": expected word<TAB>tag");
    }
    auto tag = ParsePosTag(Trim(line.substr(tab + 1)));
    if (!tag) {
      throw SchemaError(path.string() + ":" + std::to_string(i + 1) +
                        ": unknown tag '" + std::string(line.substr(tab + 1)) +
                        "'");
    }
    lex.Add(std::string(line.substr(0, tab)), *tag);
  }
  return lex;
}

const TagLexicon& TagLexicon::Default() {
  static const TagLexicon lexicon = Load(DataDir() / "data" / "tag_lexicon.tsv");
  return lexicon;
}

void TagLexicon::Add(std::string word, PosTag tag) {
  entries_.insert_or_assign(std::move(word), tag);
}

std::optional<PosTag> TagLexicon::Find(std::string_view word) const {
  auto it = entries_.find(std::string(word));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::vector<TaggedToken> PosTagTokens(const std::vector<Token>& tokens,
                                      const TagLexicon& lexicon) {
  std::vector<TaggedToken> out;
  out.reserve(tokens.size());
  bool sentence_start = true;
  for (const Token& tok : tokens) {
    TaggedToken tagged{tok.text, PosTag::kOther, tok.begin, tok.end};
    if (!IsWordToken(tok.text)) {
      out.push_back(std::move(tagged));
      if (EndsSentence(tok.text)) sentence_start = true;
      continue;
    }
    const std::string lower = ToLower(tok.text);
    const bool initial = sentence_start;
    sentence_start = false;

    if (auto clitic = CliticTag(lower)) {
      tagged.tag = *clitic;
    } else if (auto exact = lexicon.Find(tok.text)) {
      tagged.tag = *exact;
    } else {
      auto folded = lower != tok.text ? lexicon.Find(lower) : std::nullopt;
      const bool capitalized = StartsWithUpper(tok.text);
      const bool shouting = tok.text.size() > 1 && IsAllUpper(tok.text);
      if (folded && (initial || shouting || IsClosedClass(*folded))) {
        tagged.tag = *folded;
      } else if (capitalized && !initial) {
        tagged.tag = PosTag::kProperNoun;
      } else {
        tagged.tag = folded ? *folded : SuffixTag(lower);
      }
    }
    // Digits-only tokens carry no word class.
    bool has_letter = false;
    for (char c : tok.text) {
      if (!(c >= '0' && c <= '9') && c != '.' && c != ',') has_letter = true;
    }
    if (!has_letter) tagged.tag = PosTag::kOther;
    out.push_back(std::move(tagged));
  }
  return out;
}

std::filesystem::path DataDir() {
  if (const char* env = std::getenv("MSTEMP_DATA_DIR"); env && *env) {
    return env;
  }
  return MSTEMP_DATA_DIR;
}

}  // namespace mstemp
