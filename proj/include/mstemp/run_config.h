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

// Run configuration. A run config is a JSON object merged (RFC 7386 merge
// patch) over configs/defaults.json from the data directory; relative paths
// in either file resolve against that file's directory. Keys:
//
//   master_seed            u64, required
//   dataset                {path, format: tsv|jsonl, header: auto|present|
//                           absent, text_column, label_column, id_column}
//   label_space            path or inline label-space object
//   evaluators             [LmBackend]     paraphrasing models
//   evaluated              [LmBackend]     models under test
//   filter                 {provider: EmbeddingBackend, tau, max_reprompts}
//   paraphrase             {n, prompt}
//   templates              {tag_lexicon, slot_policy: SlotPolicy}
//   fill                   {m, lexicon, dedup, pronouns_from_person}
//   attacks                {enabled, kinds, rate, min_token_length,
//                           synonyms, keyboard, exempt_fills}
//   evaluation             {prompt, fairness: {n, k}}
//   workers                parallel seeds / requests
//   output_dir, cache_dir  paths (MSTEMP_CACHE_DIR overrides cache_dir)

#ifndef MSTEMP_RUN_CONFIG_H_
#define MSTEMP_RUN_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mstemp/corpus.h"
#include "mstemp/lm_client.h"
#include "mstemp/sample.h"
#include "mstemp/semantic_filter.h"
#include "mstemp/template_parser.h"

namespace mstemp {

struct DatasetConfig {
  std::filesystem::path path;
  SeedFormat format = SeedFormat::kTsv;
  TsvOptions tsv;
};

struct AttackSettings {
  bool enabled = false;
  std::set<AttackKind> kinds = {AttackKind::kSynonym};
  double rate = 0.0;
  std::size_t min_token_length = 4;
  std::filesystem::path synonyms;
  std::filesystem::path keyboard;  // empty: built-in QWERTY map
  bool exempt_fills = false;
};

struct FairnessSettings {
  std::optional<std::size_t> n;  // default: number of seed examples
  std::size_t k = 5;
};

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tau;
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::optional<std::string> attack_kinds;  // csv, enables attacks
  std::optional<double> attack_rate;
  std::optional<std::filesystem::path> output;
  std::optional<std::size_t> workers;
};

struct RunConfig {
  std::uint64_t master_seed = 0;
  DatasetConfig dataset;
  LabelSpace label_space;
  std::vector<LmBackend> evaluators;
  std::vector<LmBackend> evaluated;
  EmbeddingBackend filter_provider;
  double tau = kDefaultTau;
  std::size_t max_reprompts = 2;
  std::size_t n = 5;
  std::string paraphrase_prompt = std::string(kDefaultParaphrasePrompt);
  std::filesystem::path tag_lexicon;  // empty: bundled lexicon
  SlotPolicy slot_policy;
  std::size_t m = 5;
  std::filesystem::path lexicon;
  bool dedup = true;
  bool pronouns_from_person = true;
  AttackSettings attacks;
  std::string task_prompt;
  FairnessSettings fairness;
  std::size_t workers = 4;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> cache_dir;

  // Effective configuration, paths absolute. Drives the config hash.
  nlohmann::json effective;

  void Validate() const;

  // SHA-256 of the effective config without output_dir and cache_dir, so
  // the same experiment written to two places hashes the same.
  std::string Hash() const;

  // Parses an already merged, path-resolved config object.
  static RunConfig FromJson(const nlohmann::json& j);
};

// Reads `path`, merges it over the defaults, resolves paths and applies
// overrides. Throws ConfigError on any problem, naming the offending key.
RunConfig LoadRunConfig(const std::filesystem::path& path,
                        const CliOverrides& overrides = {});

// Same, for a config object whose relative paths resolve against `base_dir`.
RunConfig LoadRunConfigJson(const nlohmann::json& config,
                            const std::filesystem::path& base_dir,
                            const CliOverrides& overrides = {});

}  // namespace mstemp

#endif  // MSTEMP_RUN_CONFIG_H_
