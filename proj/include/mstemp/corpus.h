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

// Seed datasets, label spaces, and the generated-sample JSONL format.
//
// Generated-sample JSONL: one object per line, keys always in this order:
//   {"id", "seed_id", "template_id", "text", "label", "fills", "attacks",
//    "rng_trace"}
// fills:   [{"slot": int, "category": "PERSON"|"PRONOUN"|"NOUN", "word": str}]
// attacks: [{"kind": str, "token_index": int, "original": str,
//            "replacement": str}]

#ifndef MSTEMP_CORPUS_H_
#define MSTEMP_CORPUS_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "mstemp/sample.h"

namespace mstemp {

class LabelSpace {
 public:
  LabelSpace() = default;
  // Throws ConfigError when labels are empty/duplicated or a label has no
  // verbalizer.
  LabelSpace(std::string task_name, std::vector<std::string> labels,
             std::map<std::string, std::vector<std::string>> verbalizers,
             std::map<std::string, std::string> raw_label_map = {});

  static LabelSpace FromJson(const nlohmann::json& j);
  static LabelSpace Load(const std::filesystem::path& path);
  nlohmann::ordered_json ToJson() const;

  const std::string& task_name() const { return task_name_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::string>& verbalizers(const std::string& label) const;
  bool Contains(std::string_view label) const;

  // Maps a raw dataset value ("1", "positive") onto a label.
  std::optional<std::string> Resolve(std::string_view raw) const;

 private:
  std::string task_name_;
  std::vector<std::string> labels_;
  std::map<std::string, std::vector<std::string>> verbalizers_;
  std::map<std::string, std::string> raw_label_map_;
};

LabelSpace BinarySentimentLabelSpace();

struct SeedExample {
  std::string id;
  std::string text;
  std::string label;

  bool operator==(const SeedExample&) const = default;
};

// Immutable after construction; safe to share across threads.
class SeedDataset {
 public:
  SeedDataset(LabelSpace label_space, std::vector<SeedExample> examples);

  const LabelSpace& label_space() const { return label_space_; }
  const std::vector<SeedExample>& examples() const { return examples_; }
  std::size_t size() const { return examples_.size(); }
  const SeedExample* Find(std::string_view id) const;
  std::optional<std::size_t> IndexOf(std::string_view id) const;

 private:
  LabelSpace label_space_;
  std::vector<SeedExample> examples_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

enum class SeedFormat { kTsv, kJsonl };

std::optional<SeedFormat> ParseSeedFormat(std::string_view name);

enum class TsvHeader { kAuto, kPresent, kAbsent };

struct TsvOptions {
  TsvHeader header = TsvHeader::kAuto;
  std::string text_column = "sentence";
  std::string label_column = "label";
  std::string id_column;  // empty: ids are synthesized as seed-<row>
};

SeedDataset LoadSeedDataset(const std::filesystem::path& path,
                            SeedFormat format, const LabelSpace& label_space,
                            const TsvOptions& tsv = {});

// JSON encodings for the generated-sample schema.
nlohmann::ordered_json SampleToJson(const GeneratedSample& s);
GeneratedSample SampleFromJson(const nlohmann::json& j);

void WriteSamples(const std::vector<GeneratedSample>& samples,
                  const std::filesystem::path& path);
std::vector<GeneratedSample> ReadSamples(const std::filesystem::path& path);

// Generic JSONL helpers. ReadJsonl reports the 1-based line number of the
// first malformed line.
std::vector<nlohmann::json> ReadJsonl(const std::filesystem::path& path);
void WriteJsonl(const std::vector<nlohmann::ordered_json>& rows,
                const std::filesystem::path& path);

}  // namespace mstemp

#endif  // MSTEMP_CORPUS_H_
