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

#include "mstemp/run_config.h"

#include <cstdlib>
#include <regex>

#include "mstemp/attacks.h"
#include "mstemp/errors.h"
#include "mstemp/harness.h"
#include "mstemp/hashing.h"
#include "mstemp/tagger.h"
#include "mstemp/text_util.h"

namespace mstemp {

using nlohmann::json;

namespace {

// JSON pointers of every path-valued key.
constexpr const char* kPathKeys[] = {
    "/dataset/path",     "/label_space",      "/fill/lexicon",
    "/attacks/synonyms", "/attacks/keyboard", "/output_dir",
    "/cache_dir",        "/templates/tag_lexicon",
};

void ResolvePaths(json& j, const std::filesystem::path& base) {
  for (const char* key : kPathKeys) {
    json::json_pointer ptr(key);
    if (!j.contains(ptr) || !j.at(ptr).is_string()) continue;
    std::string value = j.at(ptr).get<std::string>();
    if (value.empty()) continue;
    std::filesystem::path p(value);
    if (p.is_relative()) p = base / p;
    j[ptr] = p.lexically_normal().string();
  }
}

json ParseJsonFile(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("config file not found: " + path.string());
  }
  try {
    return json::parse(ReadFile(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

template <typename T>
T Get(const json& j, const char* pointer, T fallback) {
  json::json_pointer ptr(pointer);
  if (!j.contains(ptr) || j.at(ptr).is_null()) return fallback;
  try {
    return j.at(ptr).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config ") + pointer + ": " + e.what());
  }
}

const json* Find(const json& j, const char* pointer) {
  json::json_pointer ptr(pointer);
  if (!j.contains(ptr) || j.at(ptr).is_null()) return nullptr;
  return &j.at(ptr);
}

void CheckBackendName(const std::string& name) {
  static const std::regex kSafe("[A-Za-z0-9._-]+");
  if (!std::regex_match(name, kSafe) || name == "." || name == ".." ||
      name == "baseline") {
    throw ConfigError("backend name '" + name +
                      "' must match [A-Za-z0-9._-]+ and not be 'baseline'");
  }
}

std::vector<LmBackend> ParseBackends(const json& j, const char* pointer) {
  std::vector<LmBackend> out;
  const json* list = Find(j, pointer);
  if (!list) return out;
  if (!list->is_array()) {
    throw ConfigError(std::string("config ") + pointer + " must be a list");
  }
  for (const auto& b : *list) out.push_back(LmBackend::FromJson(b));
  return out;
}

void ApplyOverrides(json& j, const CliOverrides& o) {
  if (o.seed) j["master_seed"] = *o.seed;
  if (o.tau) j["filter"]["tau"] = *o.tau;
  if (o.n) j["paraphrase"]["n"] = *o.n;
  if (o.m) j["fill"]["m"] = *o.m;
  if (o.attack_kinds) {
    json kinds = json::array();
    for (AttackKind k : ParseAttackKinds(*o.attack_kinds)) {
      kinds.push_back(AttackKindName(k));
    }
    j["attacks"]["kinds"] = kinds;
    j["attacks"]["enabled"] = true;
  }
  if (o.attack_rate) {
    j["attacks"]["rate"] = *o.attack_rate;
    j["attacks"]["enabled"] = true;
  }
  if (o.output) {
    j["output_dir"] =
        std::filesystem::absolute(*o.output).lexically_normal().string();
  }
  if (o.workers) j["workers"] = *o.workers;
}

}  // namespace

RunConfig RunConfig::FromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;

  const json* seed = Find(j, "/master_seed");
  if (!seed) {
    throw ConfigError(
        "config master_seed is required (set it in the config or pass --seed)");
  }
  if (!seed->is_number_unsigned()) {
    throw ConfigError("config /master_seed must be a non-negative integer");
  }
  c.master_seed = seed->get<std::uint64_t>();

  c.dataset.path = Get<std::string>(j, "/dataset/path", "");
  std::string format = Get<std::string>(j, "/dataset/format", "tsv");
  auto parsed_format = ParseSeedFormat(format);
  if (!parsed_format) throw ConfigError("config /dataset/format: " + format);
  c.dataset.format = *parsed_format;
  std::string header = Get<std::string>(j, "/dataset/header", "auto");
  if (header == "auto") {
    c.dataset.tsv.header = TsvHeader::kAuto;
  } else if (header == "present") {
    c.dataset.tsv.header = TsvHeader::kPresent;
  } else if (header == "absent") {
    c.dataset.tsv.header = TsvHeader::kAbsent;
  } else {
    throw ConfigError("config /dataset/header: " + header);
  }
  c.dataset.tsv.text_column =
      Get<std::string>(j, "/dataset/text_column", c.dataset.tsv.text_column);
  c.dataset.tsv.label_column =
      Get<std::string>(j, "/dataset/label_column", c.dataset.tsv.label_column);
  c.dataset.tsv.id_column =
      Get<std::string>(j, "/dataset/id_column", c.dataset.tsv.id_column);

  if (const json* ls = Find(j, "/label_space")) {
    c.label_space = ls->is_string() ? LabelSpace::Load(ls->get<std::string>())
                                    : LabelSpace::FromJson(*ls);
  } else {
    c.label_space = BinarySentimentLabelSpace();
  }

  c.evaluators = ParseBackends(j, "/evaluators");
  c.evaluated = ParseBackends(j, "/evaluated");
  if (const json* p = Find(j, "/filter/provider")) {
    c.filter_provider = EmbeddingBackend::FromJson(*p);
  }
  c.tau = Get<double>(j, "/filter/tau", c.tau);
  c.max_reprompts = Get<std::size_t>(j, "/filter/max_reprompts", c.max_reprompts);
  c.n = Get<std::size_t>(j, "/paraphrase/n", c.n);
  c.paraphrase_prompt =
      Get<std::string>(j, "/paraphrase/prompt", c.paraphrase_prompt);
  c.tag_lexicon = Get<std::string>(j, "/templates/tag_lexicon", "");
  if (const json* sp = Find(j, "/templates/slot_policy")) {
    c.slot_policy = SlotPolicy::FromJson(*sp);
  }
  c.m = Get<std::size_t>(j, "/fill/m", c.m);
  c.lexicon = Get<std::string>(j, "/fill/lexicon", "");
  c.dedup = Get<bool>(j, "/fill/dedup", c.dedup);
  c.pronouns_from_person =
      Get<bool>(j, "/fill/pronouns_from_person", c.pronouns_from_person);

  c.attacks.enabled = Get<bool>(j, "/attacks/enabled", c.attacks.enabled);
  if (const json* kinds = Find(j, "/attacks/kinds")) {
    if (!kinds->is_array()) throw ConfigError("config /attacks/kinds: list");
    c.attacks.kinds.clear();
    for (const auto& k : *kinds) {
      for (AttackKind kind : ParseAttackKinds(k.get<std::string>())) {
        c.attacks.kinds.insert(kind);
      }
    }
  }
  c.attacks.rate = Get<double>(j, "/attacks/rate", c.attacks.rate);
  c.attacks.min_token_length = Get<std::size_t>(
      j, "/attacks/min_token_length", c.attacks.min_token_length);
  c.attacks.synonyms = Get<std::string>(j, "/attacks/synonyms", "");
  c.attacks.keyboard = Get<std::string>(j, "/attacks/keyboard", "");
  c.attacks.exempt_fills =
      Get<bool>(j, "/attacks/exempt_fills", c.attacks.exempt_fills);

  c.task_prompt = Get<std::string>(j, "/evaluation/prompt",
                                   std::string(kDefaultTaskPrompt));
  if (const json* fn = Find(j, "/evaluation/fairness/n")) {
    c.fairness.n = fn->get<std::size_t>();
  }
  c.fairness.k = Get<std::size_t>(j, "/evaluation/fairness/k", c.fairness.k);
  c.workers = Get<std::size_t>(j, "/workers", c.workers);
  c.output_dir = Get<std::string>(j, "/output_dir", "");
  if (const char* env = std::getenv("MSTEMP_CACHE_DIR"); env && *env) {
    c.cache_dir = std::filesystem::absolute(env).lexically_normal();
  } else if (std::string cd = Get<std::string>(j, "/cache_dir", "");
             !cd.empty()) {
    c.cache_dir = cd;
  }

  c.effective = j;
  c.effective["label_space"] = json::parse(c.label_space.ToJson().dump());
  c.Validate();
  return c;
}

void RunConfig::Validate() const {
  if (dataset.path.empty()) throw ConfigError("config /dataset/path is required");
  if (evaluators.empty()) {
    throw ConfigError("config /evaluators must name at least one backend");
  }
  if (evaluated.empty()) {
    throw ConfigError("config /evaluated must name at least one backend");
  }
  std::set<std::string> names;
  for (const auto& b : evaluators) {
    CheckBackendName(b.name);
    if (!names.insert(b.name).second) {
      throw ConfigError("duplicate evaluator name " + b.name);
    }
  }
  names.clear();
  for (const auto& b : evaluated) {
    CheckBackendName(b.name);
    if (!names.insert(b.name).second) {
      throw ConfigError("duplicate evaluated model name " + b.name);
    }
  }
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw ConfigError("config /filter/tau must lie in [0, 1]");
  }
  if (n < 1) throw ConfigError("config /paraphrase/n must be >= 1");
  if (m < 1) throw ConfigError("config /fill/m must be >= 1");
  if (lexicon.empty()) throw ConfigError("config /fill/lexicon is required");
  if (!(attacks.rate >= 0.0 && attacks.rate <= 1.0)) {
    throw ConfigError("config /attacks/rate must lie in [0, 1]");
  }
  if (attacks.enabled && attacks.kinds.empty()) {
    throw ConfigError("config /attacks/kinds is empty");
  }
  if (fairness.k < 1) throw ConfigError("config /evaluation/fairness/k >= 1");
  if (fairness.n && *fairness.n < 1) {
    throw ConfigError("config /evaluation/fairness/n must be >= 1");
  }
  if (workers < 1) throw ConfigError("config /workers must be >= 1");
  if (output_dir.empty()) throw ConfigError("config /output_dir is required");
}

std::string RunConfig::Hash() const {
  json j = effective;
  j.erase("output_dir");
  j.erase("cache_dir");
  j.erase("workers");
  return Sha256Hex(j.dump());
}

RunConfig LoadRunConfigJson(const json& config,
                            const std::filesystem::path& base_dir,
                            const CliOverrides& overrides) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  const std::filesystem::path defaults_path =
      DataDir() / "configs" / "defaults.json";
  json merged = json::object();
  if (std::filesystem::exists(defaults_path)) {
    merged = ParseJsonFile(defaults_path);
    ResolvePaths(merged, defaults_path.parent_path());
  }
  json patch = config;
  ResolvePaths(patch, std::filesystem::absolute(base_dir));
  merged.merge_patch(patch);
  ApplyOverrides(merged, overrides);
  return RunConfig::FromJson(merged);
}

RunConfig LoadRunConfig(const std::filesystem::path& path,
                        const CliOverrides& overrides) {
  return LoadRunConfigJson(ParseJsonFile(path),
                           std::filesystem::absolute(path).parent_path(),
                           overrides);
}

}  // namespace mstemp
