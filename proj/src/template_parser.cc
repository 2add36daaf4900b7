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

#include "mstemp/template_parser.h"

#include "mstemp/corpus.h"
#include "mstemp/errors.h"
#include "mstemp/hashing.h"
#include "mstemp/text_util.h"

namespace mstemp {

using nlohmann::json;
using nlohmann::ordered_json;

std::optional<SlotCategory> SlotPolicy::CategoryFor(PosTag tag) const {
  auto it = eligible.find(tag);
  if (it != eligible.end()) return it->second;
  if (include_common_nouns && tag == PosTag::kNoun) return SlotCategory::kNoun;
  return std::nullopt;
}

std::string SlotPolicy::Fingerprint() const {
  std::string out;
  for (const auto& [tag, cat] : eligible) {
    out += PosTagName(tag);
    out += '=';
    out += SlotCategoryName(cat);
    out += ';';
  }
  if (include_common_nouns) out += "common-nouns;";
  out += "max=" + std::to_string(max_slots);
  return out;
}

SlotPolicy SlotPolicy::FromJson(const json& j) {
  SlotPolicy p;
  try {
    if (j.contains("tags")) {
      p.eligible.clear();
      for (const auto& [name, cat] : j.at("tags").items()) {
        auto tag = ParsePosTag(name);
        if (!tag) throw ConfigError("slot policy: unknown tag '" + name + "'");
        auto category = ParseSlotCategory(cat.get<std::string>());
        if (!category) {
          throw ConfigError("slot policy: unknown category '" +
                            cat.get<std::string>() + "'");
        }
        p.eligible[*tag] = *category;
      }
    }
    p.include_common_nouns =
        j.value("include_common_nouns", p.include_common_nouns);
    p.max_slots = j.value("max_slots", p.max_slots);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("slot policy: ") + e.what());
  }
  if (p.max_slots == 0) throw ConfigError("slot policy: max_slots must be >= 1");
  return p;
}

ordered_json SlotPolicy::ToJson() const {
  ordered_json tags = ordered_json::object();
  for (const auto& [tag, cat] : eligible) {
    tags[std::string(PosTagName(tag))] = SlotCategoryName(cat);
  }
  ordered_json j;
  j["tags"] = tags;
  j["include_common_nouns"] = include_common_nouns;
  j["max_slots"] = max_slots;
  return j;
}

std::size_t Template::slot_count() const {
  std::size_t n = 0;
  for (const auto& seg : segments) n += std::holds_alternative<SlotSegment>(seg);
  return n;
}

std::vector<const SlotSegment*> Template::slots() const {
  std::vector<const SlotSegment*> out;
  for (const auto& seg : segments) {
    if (const auto* s = std::get_if<SlotSegment>(&seg)) out.push_back(s);
  }
  return out;
}

std::string Template::Pattern() const {
  std::string out;
  for (const auto& seg : segments) {
    if (const auto* lit = std::get_if<LiteralSegment>(&seg)) {
      out += lit->text;
    } else {
      out += "[x]";
    }
  }
  return out;
}

std::string MakeTemplateId(std::string_view seed_id,
                           std::string_view source_text,
                           const SlotPolicy& policy) {
  return "tpl-" +
         HashFieldsHex({seed_id, source_text, policy.Fingerprint()}, 16);
}

std::optional<Template> ExtractTemplate(std::string_view source_text,
                                        const std::vector<TaggedToken>& tagged,
                                        const SlotPolicy& policy,
                                        std::string_view seed_id) {
  Template tpl;
  tpl.seed_id = std::string(seed_id);
  tpl.source_text = std::string(source_text);

  std::size_t cursor = 0;  // bytes of source already emitted
  std::size_t slots = 0;
  for (const TaggedToken& tok : tagged) {
    if (tok.begin < cursor || tok.end > source_text.size()) {
      throw ConfigError("tagged tokens do not match the source text");
    }
    auto category = slots < policy.max_slots ? policy.CategoryFor(tok.tag)
                                             : std::nullopt;
    if (!category) continue;
    if (tok.begin > cursor) {
      tpl.segments.emplace_back(LiteralSegment{
          std::string(source_text.substr(cursor, tok.begin - cursor))});
    }
    tpl.segments.emplace_back(SlotSegment{*category, tok.text});
    cursor = tok.end;
    ++slots;
  }
  if (slots == 0) return std::nullopt;
  if (cursor < source_text.size()) {
    tpl.segments.emplace_back(
        LiteralSegment{std::string(source_text.substr(cursor))});
  }
  tpl.template_id = MakeTemplateId(seed_id, source_text, policy);
  return tpl;
}

std::optional<Template> ParseTemplate(std::string_view source_text,
                                      std::string_view seed_id,
                                      const TagLexicon& lexicon,
                                      const SlotPolicy& policy) {
  return ExtractTemplate(source_text,
                         PosTagTokens(Tokenize(source_text), lexicon), policy,
                         seed_id);
}

std::string RenderTemplate(const Template& tpl,
                           const std::vector<std::string>& slot_words) {
  std::string out;
  std::size_t k = 0;
  for (const auto& seg : tpl.segments) {
    if (const auto* lit = std::get_if<LiteralSegment>(&seg)) {
      out += lit->text;
      continue;
    }
    if (k >= slot_words.size()) break;
    out += slot_words[k++];
  }
  if (k != slot_words.size() || k != tpl.slot_count()) {
    throw ConfigError("template " + tpl.template_id + " has " +
                      std::to_string(tpl.slot_count()) + " slots, got " +
                      std::to_string(slot_words.size()) + " words");
  }
  return out;
}

std::string RenderOriginal(const Template& tpl) {
  std::vector<std::string> words;
  for (const SlotSegment* s : tpl.slots()) words.push_back(s->original);
  return RenderTemplate(tpl, words);
}

ordered_json TemplateToJson(const Template& tpl) {
  ordered_json j;
  j["template_id"] = tpl.template_id;
  j["seed_id"] = tpl.seed_id;
  j["source_text"] = tpl.source_text;
  j["pattern"] = tpl.Pattern();
  ordered_json segs = ordered_json::array();
  for (const auto& seg : tpl.segments) {
    ordered_json sj;
    if (const auto* lit = std::get_if<LiteralSegment>(&seg)) {
      sj["literal"] = lit->text;
    } else {
      const auto& slot = std::get<SlotSegment>(seg);
      sj["slot"] = SlotCategoryName(slot.category);
      sj["original"] = slot.original;
    }
    segs.push_back(std::move(sj));
  }
  j["segments"] = std::move(segs);
  return j;
}

Template TemplateFromJson(const json& j) {
  Template tpl;
  try {
    tpl.template_id = j.at("template_id").get<std::string>();
    tpl.seed_id = j.at("seed_id").get<std::string>();
    tpl.source_text = j.at("source_text").get<std::string>();
    for (const json& sj : j.at("segments")) {
      if (sj.contains("literal")) {
        tpl.segments.emplace_back(
            LiteralSegment{sj.at("literal").get<std::string>()});
        continue;
      }
      std::string cat = sj.at("slot").get<std::string>();
      auto category = ParseSlotCategory(cat);
      if (!category) throw SchemaError("unknown slot category '" + cat + "'");
      tpl.segments.emplace_back(
          SlotSegment{*category, sj.at("original").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("template record: ") + e.what());
  }
  return tpl;
}

void WriteTemplates(const std::vector<Template>& templates,
                    const std::filesystem::path& path) {
  std::vector<ordered_json> rows;
  rows.reserve(templates.size());
  for (const auto& t : templates) rows.push_back(TemplateToJson(t));
  WriteJsonl(rows, path);
}

std::vector<Template> ReadTemplates(const std::filesystem::path& path) {
  std::vector<Template> out;
  for (const json& row : ReadJsonl(path)) out.push_back(TemplateFromJson(row));
  return out;
}

}  // namespace mstemp
