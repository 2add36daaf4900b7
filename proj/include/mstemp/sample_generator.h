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

#ifndef MSTEMP_SAMPLE_GENERATOR_H_
#define MSTEMP_SAMPLE_GENERATOR_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "mstemp/sample.h"
#include "mstemp/template_parser.h"

namespace mstemp {

// Word lists per slot category. JSON: {"PERSON":[...],"NOUN":[...],...}.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::map<SlotCategory, std::vector<std::string>> words);

  static Lexicon FromJson(const nlohmann::json& j);
  static Lexicon Load(const std::filesystem::path& path);

  // Empty when the category is absent.
  const std::vector<std::string>& words(SlotCategory c) const;

 private:
  std::map<SlotCategory, std::vector<std::string>> words_;
};

struct FillOptions {
  bool dedup = true;
  // PRONOUN slots draw from the PERSON list ("me" -> "Alice").
  bool pronouns_from_person = true;
};

// Maps seed id -> label for label propagation.
using SeedLabels = std::map<std::string, std::string, std::less<>>;

// Draws m fillings of `tpl`. Each slot gets an independent uniform draw from
// its category list, using a stream keyed by (master_seed, template_id).
std::vector<GeneratedSample> FillTemplate(const Template& tpl,
                                          const std::string& label,
                                          const Lexicon& lexicon,
                                          std::size_t m,
                                          std::uint64_t master_seed,
                                          const FillOptions& options = {});

struct GenerationCounts {
  std::size_t requested = 0;
  std::size_t realized = 0;
};

struct GeneratedSet {
  std::vector<GeneratedSample> samples;  // template input order
  std::map<std::string, GenerationCounts> per_seed;
};

GeneratedSet GenerateSet(const std::vector<Template>& templates,
                         const SeedLabels& labels, const Lexicon& lexicon,
                         std::size_t m, std::uint64_t master_seed,
                         const FillOptions& options = {});

// Re-renders the pre-attack text of a sample from its template and fills.
std::string RenderWithFills(const Template& tpl,
                            const std::vector<Fill>& fills);

}  // namespace mstemp

#endif  // MSTEMP_SAMPLE_GENERATOR_H_
