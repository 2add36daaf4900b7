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

#include "mstemp/sample_generator.h"

#include <set>
#include <unordered_set>

#include "mstemp/errors.h"
#include "mstemp/hashing.h"
#include "mstemp/text_util.h"

namespace mstemp {

using nlohmann::json;

Lexicon::Lexicon(std::map<SlotCategory, std::vector<std::string>> words) {
  for (auto& [cat, list] : words) {
    std::vector<std::string> unique;
    std::set<std::string> seen;
    for (auto& w : list) {
      std::string t(Trim(w));
      if (t.empty()) continue;
      if (seen.insert(t).second) unique.push_back(std::move(t));
    }
    words_[cat] = std::move(unique);
  }
}

Lexicon Lexicon::FromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("lexicon must be a JSON object");
  std::map<SlotCategory, std::vector<std::string>> words;
  for (const auto& [name, list] : j.items()) {
    auto cat = ParseSlotCategory(name);
    if (!cat) throw ConfigError("lexicon: unknown category '" + name + "'");
    try {
      words[*cat] = list.get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw ConfigError("lexicon category " + name + ": " + e.what());
    }
  }
  return Lexicon(std::move(words));
}

Lexicon Lexicon::Load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("lexicon not found: " + path.string());
  }
  try {
    return FromJson(json::parse(ReadFile(path)));
  } catch (const json::exception& e) {
    throw ConfigError("lexicon " + path.string() + ": " + e.what());
  }
}

const std::vector<std::string>& Lexicon::words(SlotCategory c) const {
  static const std::vector<std::string> kEmpty;
  auto it = words_.find(c);
  return it == words_.end() ? kEmpty : it->second;
}

namespace {

// A slot is at sentence start when nothing but whitespace or opening
// punctuation precedes it.
bool AtSentenceStart(const Template& tpl, std::size_t segment_index) {
  if (segment_index == 0) return true;
  if (segment_index != 1) return false;
  const auto* lit = std::get_if<LiteralSegment>(&tpl.segments[0]);
  if (!lit) return false;
  for (char c : lit->text) {
    if (c != ' ' && c != '"' && c != '\'' && c != '(' && c != '\t') return false;
  }
  return true;
}

}  // namespace

std::vector<GeneratedSample> FillTemplate(const Template& tpl,
                                          const std::string& label,
                                          const Lexicon& lexicon,
                                          std::size_t m,
                                          std::uint64_t master_seed,
                                          const FillOptions& options) {
  if (m == 0) throw ConfigError("m must be >= 1");

  struct SlotSource {
    std::size_t segment_index;
    SlotCategory category;
    const std::vector<std::string>* words;
    bool capitalize;
  };
  std::vector<SlotSource> sources;
  for (std::size_t i = 0; i < tpl.segments.size(); ++i) {
    const auto* slot = std::get_if<SlotSegment>(&tpl.segments[i]);
    if (!slot) continue;
    SlotCategory from = slot->category;
    if (from == SlotCategory::kPronoun && options.pronouns_from_person) {
      from = SlotCategory::kPerson;
    }
    const auto& words = lexicon.words(from);
    if (words.empty()) {
      throw ConfigError("lexicon has no words for category " +
                        std::string(SlotCategoryName(from)) +
                        " required by template " + tpl.template_id);
    }
    sources.push_back({i, slot->category, &words, AtSentenceStart(tpl, i)});
  }

  const std::uint64_t seed = DeriveSeed(master_seed, {"fill", tpl.template_id});
  Rng rng(seed);
  std::vector<GeneratedSample> out;
  std::unordered_set<std::string> seen;
  for (std::size_t draw = 0; draw < m; ++draw) {
    GeneratedSample s;
    s.id = tpl.template_id + "-" + std::to_string(draw);
    s.seed_id = tpl.seed_id;
    s.template_id = tpl.template_id;
    s.label = label;
    s.rng_trace = SeedToHex(seed);
    std::vector<std::string> words;
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const auto& src = sources[k];
      std::string w = (*src.words)[rng.Uniform(src.words->size())];
      if (src.capitalize) w = CapitalizeFirst(w);
      words.push_back(w);
      s.fills.push_back(Fill{k, src.category, std::move(w)});
    }
    s.text = RenderTemplate(tpl, words);
    if (options.dedup && !seen.insert(s.text).second) continue;
    out.push_back(std::move(s));
  }
  return out;
}

GeneratedSet GenerateSet(const std::vector<Template>& templates,
                         const SeedLabels& labels, const Lexicon& lexicon,
                         std::size_t m, std::uint64_t master_seed,
                         const FillOptions& options) {
  GeneratedSet set;
  for (const Template& tpl : templates) {
    auto it = labels.find(tpl.seed_id);
    if (it == labels.end()) {
      throw ConfigError("template " + tpl.template_id +
                        " refers to unknown seed " + tpl.seed_id);
    }
    std::vector<GeneratedSample> filled =
        FillTemplate(tpl, it->second, lexicon, m, master_seed, options);
    GenerationCounts& counts = set.per_seed[tpl.seed_id];
    counts.requested += m;
    counts.realized += filled.size();
    for (auto& s : filled) set.samples.push_back(std::move(s));
  }
  return set;
}

std::string RenderWithFills(const Template& tpl,
                            const std::vector<Fill>& fills) {
  std::vector<std::string> words(tpl.slot_count());
  if (fills.size() != words.size()) {
    throw ConfigError("fill count does not match template " + tpl.template_id);
  }
  for (const Fill& f : fills) {
    if (f.slot >= words.size()) {
      throw ConfigError("fill slot out of range for " + tpl.template_id);
    }
    words[f.slot] = f.word;
  }
  return RenderTemplate(tpl, words);
}

}  // namespace mstemp
