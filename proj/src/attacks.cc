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

#include "mstemp/attacks.h"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "mstemp/errors.h"
#include "mstemp/text_util.h"
#include "mstemp/tokenizer.h"

namespace mstemp {

using nlohmann::json;

const KeyboardMap& QwertyKeyboard() {
  static const KeyboardMap kMap = {
      {'q', "wa"},   {'w', "qeas"},  {'e', "wrsd"},  {'r', "etdf"},
      {'t', "ryfg"}, {'y', "tugh"},  {'u', "yihj"},  {'i', "uojk"},
      {'o', "ipkl"}, {'p', "ol"},    {'a', "qwsz"},  {'s', "awedxz"},
      {'d', "serfcx"}, {'f', "drtgvc"}, {'g', "ftyhbv"}, {'h', "gyujnb"},
      {'j', "huikmn"}, {'k', "jiolm"}, {'l', "kop"},  {'z', "asx"},
      {'x', "zsdc"}, {'c', "xdfv"},  {'v', "cfgb"},  {'b', "vghn"},
      {'n', "bhjm"}, {'m', "njk"},
  };
  return kMap;
}

KeyboardMap LoadKeyboardMap(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw ConfigError("keyboard map " + path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  KeyboardMap map;
  for (const auto& [key, adj] : j.items()) {
    if (key.size() != 1 || !std::isalpha(static_cast<unsigned char>(key[0])) ||
        !adj.is_string()) {
      throw ConfigError("keyboard map: bad entry '" + key + "'");
    }
    std::string neighbours;
    for (char c : adj.get<std::string>()) {
      if (!std::isalpha(static_cast<unsigned char>(c))) {
        throw ConfigError("keyboard map: non-letter neighbour for '" + key + "'");
      }
      neighbours.push_back(static_cast<char>(std::tolower(c)));
    }
    map[static_cast<char>(std::tolower(key[0]))] = neighbours;
  }
  return map;
}

SynonymTable SynonymTableFromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("synonym table must be a JSON object");
  SynonymTable table;
  for (const auto& [word, list] : j.items()) {
    if (!list.is_array()) {
      throw ConfigError("synonym table: entry '" + word + "' is not a list");
    }
    std::vector<std::string> syns;
    const std::string key = ToLower(word);
    for (const auto& s : list) {
      if (!s.is_string()) {
        throw ConfigError("synonym table: non-string synonym for '" + word + "'");
      }
      std::string syn = s.get<std::string>();
      std::vector<Token> toks = Tokenize(syn);
      if (toks.size() != 1 || toks[0].text != syn) {
        throw ConfigError("synonym table: '" + syn + "' (for '" + word +
                          "') is not a single token");
      }
      if (ToLower(syn) == key) continue;
      if (std::find(syns.begin(), syns.end(), syn) == syns.end()) {
        syns.push_back(std::move(syn));
      }
    }
    if (!syns.empty()) table[key] = std::move(syns);
  }
  return table;
}

SynonymTable LoadSynonymTable(const std::filesystem::path& path) {
  try {
    return SynonymTableFromJson(json::parse(ReadFile(path)));
  } catch (const json::exception& e) {
    throw ConfigError("synonym table " + path.string() + ": " + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

void AttackConfig::Validate() const {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw ConfigError("attack rate must be in [0, 1]");
  }
  if (min_token_length < 3) {
    throw ConfigError("min_token_length must be >= 3 (first and last "
                      "characters are protected)");
  }
  if (kinds.count(AttackKind::kSynonym) && rate > 0 && synonyms.empty()) {
    throw ConfigError("synonym attacks enabled but the synonym table is empty");
  }
}

std::set<AttackKind> ParseAttackKinds(std::string_view csv) {
  std::set<AttackKind> kinds;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    if (comma == std::string_view::npos) comma = csv.size();
    std::string_view item = Trim(csv.substr(start, comma - start));
    if (item == "typo") {
      kinds.insert({AttackKind::kTypoSwap, AttackKind::kTypoDelete,
                    AttackKind::kTypoInsert, AttackKind::kTypoSubstitute});
    } else if (!item.empty()) {
      auto k = ParseAttackKind(item);
      if (!k) throw ConfigError("unknown attack kind '" + std::string(item) + "'");
      kinds.insert(*k);
    }
    start = comma + 1;
  }
  return kinds;
}

namespace {

char MatchCase(char like, char c) {
  return std::isupper(static_cast<unsigned char>(like))
             ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
             : c;
}

std::string_view Neighbours(const KeyboardMap& keyboard, char c) {
  auto it = keyboard.find(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return it == keyboard.end() ? std::string_view() : std::string_view(it->second);
}

std::string ApplyCase(std::string_view like, std::string word) {
  if (like.size() > 1 && IsAllUpper(like)) return ToUpper(word);
  if (StartsWithUpper(like)) return CapitalizeFirst(word);
  return word;
}

// Token index -> text with that token replaced.
std::string ReplaceToken(std::string_view text, const std::vector<Token>& tokens,
                         std::size_t index, std::string_view replacement) {
  const Token& t = tokens[index];
  std::string out(text.substr(0, t.begin));
  out += replacement;
  out += text.substr(t.end);
  return out;
}

bool PreservesTokens(std::string_view new_text,
                     const std::vector<Token>& old_tokens, std::size_t index,
                     std::string_view replacement) {
  std::vector<Token> now = Tokenize(new_text);
  if (now.size() != old_tokens.size()) return false;
  for (std::size_t i = 0; i < now.size(); ++i) {
    if (i == index ? now[i].text != replacement
                   : now[i].text != old_tokens[i].text) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::optional<std::string> TypoAttack(std::string_view word, AttackKind kind,
                                      Rng& rng, const KeyboardMap& keyboard,
                                      std::size_t min_token_length) {
  if (word.size() < std::max<std::size_t>(min_token_length, 3) ||
      !IsAsciiAlpha(word)) {
    return std::nullopt;
  }
  const std::size_t n = word.size();
  std::string out(word);
  switch (kind) {
    case AttackKind::kTypoSwap: {
      // Pairs (i, i+1) with both positions interior and distinct letters.
      std::vector<std::size_t> pos;
      for (std::size_t i = 1; i + 2 < n; ++i) {
        if (word[i] != word[i + 1]) pos.push_back(i);
      }
      if (pos.empty()) return std::nullopt;
      std::size_t i = pos[rng.Uniform(pos.size())];
      std::swap(out[i], out[i + 1]);
      return out;
    }
    case AttackKind::kTypoDelete: {
      std::size_t i = 1 + rng.Uniform(n - 2);
      out.erase(i, 1);
      return out;
    }
    case AttackKind::kTypoInsert: {
      // Insert before position p, p in [1, n-1]; the new letter neighbours
      // one of the two characters it lands between.
      std::vector<std::pair<std::size_t, char>> options;
      for (std::size_t p = 1; p < n; ++p) {
        for (char side : {word[p - 1], word[p]}) {
          for (char c : Neighbours(keyboard, side)) {
            options.emplace_back(p, MatchCase(side, c));
          }
        }
      }
      if (options.empty()) return std::nullopt;
      auto [p, c] = options[rng.Uniform(options.size())];
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(p), c);
      return out;
    }
    case AttackKind::kTypoSubstitute: {
      std::vector<std::pair<std::size_t, char>> options;
      for (std::size_t i = 1; i + 1 < n; ++i) {
        for (char c : Neighbours(keyboard, word[i])) {
          char repl = MatchCase(word[i], c);
          if (repl != word[i]) options.emplace_back(i, repl);
        }
      }
      if (options.empty()) return std::nullopt;
      auto [i, c] = options[rng.Uniform(options.size())];
      out[i] = c;
      return out;
    }
    case AttackKind::kSynonym:
      break;
  }
  return std::nullopt;
}

std::optional<std::string> SynonymAttack(std::string_view word,
                                         const SynonymTable& table, Rng& rng) {
  auto it = table.find(ToLower(word));
  if (it == table.end() || it->second.empty()) return std::nullopt;
  const auto& syns = it->second;
  std::string pick = syns[rng.Uniform(syns.size())];
  std::string cased = ApplyCase(word, pick);
  if (cased == word) return std::nullopt;
  return cased;
}

GeneratedSample AttackSample(const GeneratedSample& sample,
                             const AttackConfig& config,
                             std::uint64_t master_seed, const Template* tpl) {
  config.Validate();
  if (config.rate <= 0.0 || config.kinds.empty()) return sample;

  std::vector<Token> tokens = Tokenize(sample.text);

  // Byte ranges produced by slot fills; only needed to exempt them.
  std::vector<std::pair<std::size_t, std::size_t>> fill_spans;
  if (config.exempt_fills) {
    if (tpl == nullptr) {
      throw ConfigError("exempt_fills requires the sample's template");
    }
    std::size_t offset = 0;
    std::size_t k = 0;
    for (const auto& seg : tpl->segments) {
      if (const auto* lit = std::get_if<LiteralSegment>(&seg)) {
        offset += lit->text.size();
        continue;
      }
      if (k >= sample.fills.size()) break;
      const std::string& w = sample.fills[k++].word;
      fill_spans.emplace_back(offset, offset + w.size());
      offset += w.size();
    }
  }
  auto in_fill = [&](const Token& t) {
    for (auto [b, e] : fill_spans) {
      if (t.begin < e && b < t.end) return true;
    }
    return false;
  };

  auto applicable = [&](const Token& t) {
    std::vector<AttackKind> kinds;
    if (in_fill(t)) return kinds;
    const bool typo_ok =
        t.text.size() >= config.min_token_length && IsAsciiAlpha(t.text);
    for (AttackKind k : config.kinds) {
      if (IsTypo(k) ? typo_ok
                    : config.synonyms.find(ToLower(t.text)) !=
                          config.synonyms.end()) {
        kinds.push_back(k);
      }
    }
    return kinds;
  };

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!applicable(tokens[i]).empty()) eligible.push_back(i);
  }
  if (eligible.empty()) return sample;

  // Guard against 0.3 * 10 = 3.0000000000000004 rounding up to 4.
  std::size_t count = static_cast<std::size_t>(
      std::ceil(config.rate * static_cast<double>(eligible.size()) - 1e-9));
  count = std::min(count, eligible.size());

  Rng rng(DeriveSeed(master_seed, {"attack", sample.id}));
  // Partial Fisher-Yates: the first `count` entries become the selection.
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + rng.Uniform(eligible.size() - i);
    std::swap(eligible[i], eligible[j]);
  }
  std::vector<std::size_t> chosen(eligible.begin(),
                                  eligible.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(chosen.begin(), chosen.end());

  GeneratedSample out = sample;
  for (std::size_t index : chosen) {
    const Token& tok = tokens[index];
    // Kinds are tried in random order until one yields a valid edit.
    std::vector<AttackKind> kinds = applicable(tok);
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      std::swap(kinds[i], kinds[i + rng.Uniform(kinds.size() - i)]);
      const AttackKind kind = kinds[i];
      std::optional<std::string> repl =
          IsTypo(kind) ? TypoAttack(tok.text, kind, rng, config.keyboard,
                                    config.min_token_length)
                       : SynonymAttack(tok.text, config.synonyms, rng);
      if (!repl || *repl == tok.text) continue;
      std::string candidate = ReplaceToken(out.text, tokens, index, *repl);
      if (!PreservesTokens(candidate, tokens, index, *repl)) continue;
      out.attacks.push_back(AttackRecord{kind, index, tok.text, *repl});
      out.text = std::move(candidate);
      tokens = Tokenize(out.text);
      break;
    }
  }
  return out;
}

std::string ReplayAttacks(std::string_view text,
                          const std::vector<AttackRecord>& records) {
  std::string out(text);
  for (const AttackRecord& r : records) {
    std::vector<Token> tokens = Tokenize(out);
    if (r.token_index >= tokens.size() ||
        tokens[r.token_index].text != r.original) {
      throw ConfigError("attack record does not match token " +
                        std::to_string(r.token_index) + " ('" + r.original +
                        "')");
    }
    out = ReplaceToken(out, tokens, r.token_index, r.replacement);
  }
  return out;
}

std::string UndoAttacks(std::string_view text,
                        const std::vector<AttackRecord>& records) {
  std::string out(text);
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    std::vector<Token> tokens = Tokenize(out);
    if (it->token_index >= tokens.size() ||
        tokens[it->token_index].text != it->replacement) {
      throw ConfigError("attack record does not match token " +
                        std::to_string(it->token_index) + " ('" +
                        it->replacement + "')");
    }
    out = ReplaceToken(out, tokens, it->token_index, it->original);
  }
  return out;
}

}  // namespace mstemp
