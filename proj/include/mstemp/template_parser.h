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

// Turns an accepted paraphrase into a slotted template such as
// "Today brings [x] immense joy": tokenize, tag, then replace the words the
// SlotPolicy marks as eligible with typed slots.
//
// Template JSONL record:
//   {"template_id", "seed_id", "source_text", "pattern",
//    "segments": [{"literal": str} | {"slot": CATEGORY, "original": str}]}
// "pattern" is informational ("[x]" per slot) and ignored on read.

#ifndef MSTEMP_TEMPLATE_PARSER_H_
#define MSTEMP_TEMPLATE_PARSER_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mstemp/sample.h"
#include "mstemp/tagger.h"

namespace mstemp {

struct SlotPolicy {
  // Tag whitelist: which word classes become slots, and with which category.
  std::map<PosTag, SlotCategory> eligible = {
      {PosTag::kPronoun, SlotCategory::kPronoun},
      {PosTag::kProperNoun, SlotCategory::kPerson},
  };
  bool include_common_nouns = false;  // adds noun -> NOUN
  std::size_t max_slots = 4;          // earliest eligible tokens win

  std::optional<SlotCategory> CategoryFor(PosTag tag) const;

  // Canonical string folded into template ids.
  std::string Fingerprint() const;

  static SlotPolicy FromJson(const nlohmann::json& j);
  nlohmann::ordered_json ToJson() const;
};

struct LiteralSegment {
  std::string text;
  bool operator==(const LiteralSegment&) const = default;
};

struct SlotSegment {
  SlotCategory category = SlotCategory::kPerson;
  std::string original;
  bool operator==(const SlotSegment&) const = default;
};

using TemplateSegment = std::variant<LiteralSegment, SlotSegment>;

struct Template {
  std::string template_id;
  std::string seed_id;
  std::string source_text;
  std::vector<TemplateSegment> segments;

  std::size_t slot_count() const;
  // Slots in order of appearance.
  std::vector<const SlotSegment*> slots() const;
  // "[x]" in place of each slot.
  std::string Pattern() const;

  bool operator==(const Template&) const = default;
};

std::string MakeTemplateId(std::string_view seed_id,
                           std::string_view source_text,
                           const SlotPolicy& policy);

// Returns nullopt when the policy selects no slot.
std::optional<Template> ExtractTemplate(std::string_view source_text,
                                        const std::vector<TaggedToken>& tagged,
                                        const SlotPolicy& policy,
                                        std::string_view seed_id);

// Tokenize + tag + extract.
std::optional<Template> ParseTemplate(std::string_view source_text,
                                      std::string_view seed_id,
                                      const TagLexicon& lexicon,
                                      const SlotPolicy& policy);

// Renders with one word per slot, in slot order. Throws ConfigError when
// the word count does not match the slot count.
std::string RenderTemplate(const Template& tpl,
                           const std::vector<std::string>& slot_words);
std::string RenderOriginal(const Template& tpl);

nlohmann::ordered_json TemplateToJson(const Template& tpl);
Template TemplateFromJson(const nlohmann::json& j);

void WriteTemplates(const std::vector<Template>& templates,
                    const std::filesystem::path& path);
std::vector<Template> ReadTemplates(const std::filesystem::path& path);

}  // namespace mstemp

#endif  // MSTEMP_TEMPLATE_PARSER_H_
