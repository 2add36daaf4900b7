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

#include "mstemp/corpus.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "mstemp/errors.h"
#include "mstemp/text_util.h"

namespace mstemp {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view SlotCategoryName(SlotCategory c) {
  switch (c) {
    case SlotCategory::kPerson:
      return "PERSON";
    case SlotCategory::kPronoun:
      return "PRONOUN";
    case SlotCategory::kNoun:
      return "NOUN";
  }
  return "?";
}

std::optional<SlotCategory> ParseSlotCategory(std::string_view name) {
  if (name == "PERSON") return SlotCategory::kPerson;
  if (name == "PRONOUN") return SlotCategory::kPronoun;
  if (name == "NOUN") return SlotCategory::kNoun;
  return std::nullopt;
}

std::string_view AttackKindName(AttackKind k) {
  switch (k) {
    case AttackKind::kTypoSwap:
      return "typo-swap";
    case AttackKind::kTypoDelete:
      return "typo-delete";
    case AttackKind::kTypoInsert:
      return "typo-insert";
    case AttackKind::kTypoSubstitute:
      return "typo-substitute";
    case AttackKind::kSynonym:
      return "synonym";
  }
  return "?";
}

std::optional<AttackKind> ParseAttackKind(std::string_view name) {
  for (AttackKind k : {AttackKind::kTypoSwap, AttackKind::kTypoDelete,
                       AttackKind::kTypoInsert, AttackKind::kTypoSubstitute,
                       AttackKind::kSynonym}) {
    if (AttackKindName(k) == name) return k;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// LabelSpace

LabelSpace::LabelSpace(std::string task_name, std::vector<std::string> labels,
                       std::map<std::string, std::vector<std::string>> verbalizers,
                       std::map<std::string, std::string> raw_label_map)
    : task_name_(std::move(task_name)),
      labels_(std::move(labels)),
      verbalizers_(std::move(verbalizers)),
      raw_label_map_(std::move(raw_label_map)) {
  if (labels_.empty()) throw ConfigError("label space has no labels");
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw ConfigError("label space contains an empty label");
    if (!seen.insert(l).second) throw ConfigError("duplicate label: " + l);
    auto it = verbalizers_.find(l);
    if (it == verbalizers_.end() || it->second.empty()) {
      throw ConfigError("label '" + l + "' has no verbalizer");
    }
    for (const auto& v : it->second) {
      if (Trim(v).empty()) {
        throw ConfigError("label '" + l + "' has an empty verbalizer");
      }
    }
  }
  for (const auto& [label, _] : verbalizers_) {
    if (!seen.count(label)) {
      throw ConfigError("verbalizer given for unknown label: " + label);
    }
  }
  for (const auto& [raw, label] : raw_label_map_) {
    if (!seen.count(label)) {
      throw ConfigError("raw label '" + raw + "' maps to unknown label '" +
                        label + "'");
    }
  }
}

LabelSpace LabelSpace::FromJson(const json& j) {
  try {
    std::map<std::string, std::vector<std::string>> verbalizers;
    std::vector<std::string> labels = j.at("labels").get<std::vector<std::string>>();
    if (j.contains("verbalizers")) {
      verbalizers = j.at("verbalizers")
                        .get<std::map<std::string, std::vector<std::string>>>();
    } else {
      for (const auto& l : labels) verbalizers[l] = {l};
    }
    std::map<std::string, std::string> raw;
    if (j.contains("raw_label_map")) {
      raw = j.at("raw_label_map").get<std::map<std::string, std::string>>();
    }
    return LabelSpace(j.value("task_name", std::string("task")),
                      std::move(labels), std::move(verbalizers), std::move(raw));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid label space: ") + e.what());
  }
}

LabelSpace LabelSpace::Load(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw ConfigError("label space " + path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return FromJson(j);
}

ordered_json LabelSpace::ToJson() const {
  ordered_json j;
  j["task_name"] = task_name_;
  j["labels"] = labels_;
  ordered_json verb = ordered_json::object();
  for (const auto& l : labels_) verb[l] = verbalizers_.at(l);
  j["verbalizers"] = verb;
  ordered_json raw = ordered_json::object();
  for (const auto& [k, v] : raw_label_map_) raw[k] = v;
  j["raw_label_map"] = raw;
  return j;
}

const std::vector<std::string>& LabelSpace::verbalizers(
    const std::string& label) const {
  auto it = verbalizers_.find(label);
  if (it == verbalizers_.end()) throw ConfigError("unknown label: " + label);
  return it->second;
}

bool LabelSpace::Contains(std::string_view label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::optional<std::string> LabelSpace::Resolve(std::string_view raw) const {
  std::string_view t = Trim(raw);
  if (Contains(t)) return std::string(t);
  auto it = raw_label_map_.find(std::string(t));
  if (it != raw_label_map_.end()) return it->second;
  return std::nullopt;
}

LabelSpace BinarySentimentLabelSpace() {
  return LabelSpace("sentiment", {"positive", "negative"},
                    {{"positive", {"positive"}}, {"negative", {"negative"}}},
                    {{"0", "negative"}, {"1", "positive"}});
}

// ---------------------------------------------------------------------------
// SeedDataset

SeedDataset::SeedDataset(LabelSpace label_space,
                         std::vector<SeedExample> examples)
    : label_space_(std::move(label_space)), examples_(std::move(examples)) {
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    const SeedExample& ex = examples_[i];
    if (Trim(ex.text).empty()) {
      throw SchemaError("seed '" + ex.id + "' has empty text");
    }
    if (!label_space_.Contains(ex.label)) {
      throw SchemaError("seed '" + ex.id + "' has unknown label '" + ex.label +
                        "'");
    }
    if (!by_id_.emplace(ex.id, i).second) {
      throw SchemaError("duplicate seed id: " + ex.id);
    }
  }
}

const SeedExample* SeedDataset::Find(std::string_view id) const {
  auto idx = IndexOf(id);
  return idx ? &examples_[*idx] : nullptr;
}

std::optional<std::size_t> SeedDataset::IndexOf(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::optional<SeedFormat> ParseSeedFormat(std::string_view name) {
  if (name == "tsv") return SeedFormat::kTsv;
  if (name == "jsonl") return SeedFormat::kJsonl;
  return std::nullopt;
}

namespace {

std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string LineTag(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no) + ": ";
}

SeedExample MakeSeed(const std::filesystem::path& path, std::size_t line_no,
                     std::string id, std::string_view text,
                     std::string_view raw_label, const LabelSpace& space) {
  std::string_view trimmed = Trim(text);
  if (trimmed.empty()) throw SchemaError(LineTag(path, line_no) + "empty text");
  if (trimmed.find('\n') != std::string_view::npos) {
    throw SchemaError(LineTag(path, line_no) +
                      "text spans multiple lines; one sentence per example");
  }
  auto label = space.Resolve(raw_label);
  if (!label) {
    throw SchemaError(LineTag(path, line_no) + "unknown label '" +
                      std::string(raw_label) + "'");
  }
  return SeedExample{std::move(id), NormalizeNfc(trimmed), *label};
}

std::vector<SeedExample> LoadTsv(const std::filesystem::path& path,
                                 const LabelSpace& space,
                                 const TsvOptions& opts) {
  std::vector<std::string> lines = SplitLines(ReadFile(path));
  std::vector<SeedExample> out;
  std::size_t text_col = 0, label_col = 1;
  std::optional<std::size_t> id_col;
  std::size_t first = 0;

  bool has_header = false;
  if (!lines.empty()) {
    std::vector<std::string> head = SplitTabs(lines[0]);
    auto find = [&](const std::string& name) -> std::optional<std::size_t> {
      auto it = std::find(head.begin(), head.end(), name);
      if (it == head.end()) return std::nullopt;
      return static_cast<std::size_t>(it - head.begin());
    };
    auto tc = find(opts.text_column);
    auto lc = find(opts.label_column);
    has_header = opts.header == TsvHeader::kPresent ||
                 (opts.header == TsvHeader::kAuto && tc && lc);
    if (has_header) {
      if (!tc || !lc) {
        throw SchemaError(LineTag(path, 1) + "header lacks column '" +
                          (tc ? opts.label_column : opts.text_column) + "'");
      }
      text_col = *tc;
      label_col = *lc;
      if (!opts.id_column.empty()) {
        id_col = find(opts.id_column);
        if (!id_col) {
          throw SchemaError(LineTag(path, 1) + "header lacks column '" +
                            opts.id_column + "'");
        }
      }
      first = 1;
    }
  }
  const std::size_t needed =
      std::max({text_col, label_col, id_col.value_or(0)}) + 1;

  std::size_t row = 0;
  for (std::size_t i = first; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (Trim(lines[i]).empty()) continue;
    std::vector<std::string> fields = SplitTabs(lines[i]);
    if (fields.size() < needed) {
      throw SchemaError(LineTag(path, line_no) + "expected at least " +
                        std::to_string(needed) + " tab-separated fields, got " +
                        std::to_string(fields.size()));
    }
    std::string id = id_col ? std::string(Trim(fields[*id_col]))
                            : "seed-" + std::to_string(row);
    if (id.empty()) throw SchemaError(LineTag(path, line_no) + "empty id");
    out.push_back(MakeSeed(path, line_no, std::move(id), fields[text_col],
                           fields[label_col], space));
    ++row;
  }
  return out;
}

std::vector<SeedExample> LoadJsonlSeeds(const std::filesystem::path& path,
                                        const LabelSpace& space) {
  std::vector<std::string> lines = SplitLines(ReadFile(path));
  std::vector<SeedExample> out;
  std::size_t row = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (Trim(lines[i]).empty()) continue;
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw SchemaError(LineTag(path, line_no) + e.what());
    }
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string()) {
      throw SchemaError(LineTag(path, line_no) + "missing string field \"text\"");
    }
    if (!j.contains("label")) {
      throw SchemaError(LineTag(path, line_no) + "missing field \"label\"");
    }
    std::string raw_label;
    if (j["label"].is_string()) {
      raw_label = j["label"].get<std::string>();
    } else if (j["label"].is_number_integer()) {
      raw_label = std::to_string(j["label"].get<long long>());
    } else {
      throw SchemaError(LineTag(path, line_no) +
                        "\"label\" must be a string or integer");
    }
    std::string id = "seed-" + std::to_string(row);
    if (j.contains("id")) {
      if (!j["id"].is_string()) {
        throw SchemaError(LineTag(path, line_no) + "\"id\" must be a string");
      }
      id = j["id"].get<std::string>();
    }
    out.push_back(MakeSeed(path, line_no, std::move(id),
                           j["text"].get<std::string>(), raw_label, space));
    ++row;
  }
  return out;
}

}  // namespace

SeedDataset LoadSeedDataset(const std::filesystem::path& path,
                            SeedFormat format, const LabelSpace& label_space,
                            const TsvOptions& tsv) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("seed dataset not found: " + path.string());
  }
  std::vector<SeedExample> examples = format == SeedFormat::kTsv
                                          ? LoadTsv(path, label_space, tsv)
                                          : LoadJsonlSeeds(path, label_space);
  return SeedDataset(label_space, std::move(examples));
}

// ---------------------------------------------------------------------------
// Generated samples

ordered_json SampleToJson(const GeneratedSample& s) {
  ordered_json j;
  j["id"] = s.id;
  j["seed_id"] = s.seed_id;
  j["template_id"] = s.template_id;
  j["text"] = s.text;
  j["label"] = s.label;
  ordered_json fills = ordered_json::array();
  for (const Fill& f : s.fills) {
    ordered_json fj;
    fj["slot"] = f.slot;
    fj["category"] = SlotCategoryName(f.category);
    fj["word"] = f.word;
    fills.push_back(std::move(fj));
  }
  j["fills"] = std::move(fills);
  ordered_json attacks = ordered_json::array();
  for (const AttackRecord& a : s.attacks) {
    ordered_json aj;
    aj["kind"] = AttackKindName(a.kind);
    aj["token_index"] = a.token_index;
    aj["original"] = a.original;
    aj["replacement"] = a.replacement;
    attacks.push_back(std::move(aj));
  }
  j["attacks"] = std::move(attacks);
  j["rng_trace"] = s.rng_trace;
  return j;
}

namespace {

const json& Field(const json& j, const char* key, json::value_t type) {
  if (!j.contains(key)) {
    throw SchemaError(std::string("missing field \"") + key + "\"");
  }
  const json& v = j.at(key);
  bool ok = v.type() == type ||
            (type == json::value_t::number_unsigned && v.is_number_integer() &&
             v.get<long long>() >= 0);
  if (!ok) throw SchemaError(std::string("field \"") + key + "\" has wrong type");
  return v;
}

}  // namespace

GeneratedSample SampleFromJson(const json& j) {
  using vt = json::value_t;
  if (!j.is_object()) throw SchemaError("sample is not a JSON object");
  GeneratedSample s;
  s.id = Field(j, "id", vt::string).get<std::string>();
  s.seed_id = Field(j, "seed_id", vt::string).get<std::string>();
  s.template_id = Field(j, "template_id", vt::string).get<std::string>();
  s.text = Field(j, "text", vt::string).get<std::string>();
  s.label = Field(j, "label", vt::string).get<std::string>();
  for (const json& fj : Field(j, "fills", vt::array)) {
    Fill f;
    f.slot = Field(fj, "slot", vt::number_unsigned).get<std::size_t>();
    std::string cat = Field(fj, "category", vt::string).get<std::string>();
    auto parsed = ParseSlotCategory(cat);
    if (!parsed) throw SchemaError("unknown slot category '" + cat + "'");
    f.category = *parsed;
    f.word = Field(fj, "word", vt::string).get<std::string>();
    s.fills.push_back(std::move(f));
  }
  for (const json& aj : Field(j, "attacks", vt::array)) {
    AttackRecord a;
    std::string kind = Field(aj, "kind", vt::string).get<std::string>();
    auto parsed = ParseAttackKind(kind);
    if (!parsed) throw SchemaError("unknown attack kind '" + kind + "'");
    a.kind = *parsed;
    a.token_index =
        Field(aj, "token_index", vt::number_unsigned).get<std::size_t>();
    a.original = Field(aj, "original", vt::string).get<std::string>();
    a.replacement = Field(aj, "replacement", vt::string).get<std::string>();
    s.attacks.push_back(std::move(a));
  }
  if (j.contains("rng_trace")) {
    s.rng_trace = Field(j, "rng_trace", vt::string).get<std::string>();
  }
  return s;
}

std::vector<json> ReadJsonl(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error("no such file: " + path.string());
  }
  std::vector<std::string> lines = SplitLines(ReadFile(path));
  std::vector<json> rows;
  rows.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    try {
      rows.push_back(json::parse(lines[i]));
    } catch (const json::exception& e) {
      throw SchemaError(LineTag(path, i + 1) + e.what());
    }
  }
  return rows;
}

void WriteJsonl(const std::vector<ordered_json>& rows,
                const std::filesystem::path& path) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out.push_back('\n');
  }
  WriteFileAtomic(path, out);
}

void WriteSamples(const std::vector<GeneratedSample>& samples,
                  const std::filesystem::path& path) {
  std::string out;
  for (const auto& s : samples) {
    out += SampleToJson(s).dump();
    out.push_back('\n');
  }
  WriteFileAtomic(path, out);
}

std::vector<GeneratedSample> ReadSamples(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error("no such file: " + path.string());
  }
  std::vector<std::string> lines = SplitLines(ReadFile(path));
  std::vector<GeneratedSample> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty()) continue;
    try {
      out.push_back(SampleFromJson(json::parse(lines[i])));
    } catch (const json::exception& e) {
      throw SchemaError(LineTag(path, i + 1) + e.what());
    } catch (const SchemaError& e) {
      throw SchemaError(LineTag(path, i + 1) + e.what());
    }
  }
  return out;
}

}  // namespace mstemp
