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

// Random perturbations that raise sample difficulty: single-edit typos
// (swap, delete, insert, substitute) and synonym substitution. Typos never
// touch the first or last character of a word, and every edit keeps the
// token count of the sample unchanged, so an AttackRecord's token_index is
// valid both before and after the attack.

#ifndef MSTEMP_ATTACKS_H_
#define MSTEMP_ATTACKS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mstemp/hashing.h"
#include "mstemp/sample.h"
#include "mstemp/template_parser.h"

namespace mstemp {

// Lowercase letter -> neighbouring keys.
using KeyboardMap = std::map<char, std::string>;

const KeyboardMap& QwertyKeyboard();
KeyboardMap LoadKeyboardMap(const std::filesystem::path& path);

// Lowercase word -> single-token synonyms.
using SynonymTable = std::map<std::string, std::vector<std::string>, std::less<>>;

SynonymTable SynonymTableFromJson(const nlohmann::json& j);
SynonymTable LoadSynonymTable(const std::filesystem::path& path);

struct AttackConfig {
  std::set<AttackKind> kinds = {AttackKind::kSynonym};
  double rate = 0.0;  // fraction of eligible tokens attacked per sample
  std::size_t min_token_length = 4;
  SynonymTable synonyms;
  KeyboardMap keyboard = QwertyKeyboard();
  bool exempt_fills = false;  // leave slot-filled words untouched

  void Validate() const;
};

// Parses "typo-swap,synonym" style lists; "typo" expands to all four typo
// kinds.
std::set<AttackKind> ParseAttackKinds(std::string_view csv);

// One edit of the requested kind, or nullopt when the word is too short,
// not alphabetic, or admits no such edit.
std::optional<std::string> TypoAttack(std::string_view word, AttackKind kind,
                                      Rng& rng,
                                      const KeyboardMap& keyboard = QwertyKeyboard(),
                                      std::size_t min_token_length = 4);

std::optional<std::string> SynonymAttack(std::string_view word,
                                         const SynonymTable& table, Rng& rng);

// Attacks ceil(rate * eligible) distinct tokens of `sample`, each once,
// using a stream keyed by (master_seed, sample.id). `tpl` is required only
// when config.exempt_fills is set.
GeneratedSample AttackSample(const GeneratedSample& sample,
                             const AttackConfig& config,
                             std::uint64_t master_seed,
                             const Template* tpl = nullptr);

// Applies records in order to `text`; throws ConfigError when a record does
// not match the token it names.
std::string ReplayAttacks(std::string_view text,
                          const std::vector<AttackRecord>& records);

// Inverse of ReplayAttacks.
std::string UndoAttacks(std::string_view text,
                        const std::vector<AttackRecord>& records);

}  // namespace mstemp

#endif  // MSTEMP_ATTACKS_H_
