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

// Plain records shared by the generator, the attack module, the harness and
// the JSONL artifact readers/writers.

#ifndef MSTEMP_SAMPLE_H_
#define MSTEMP_SAMPLE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mstemp {

enum class SlotCategory { kPerson, kPronoun, kNoun };

std::string_view SlotCategoryName(SlotCategory c);
std::optional<SlotCategory> ParseSlotCategory(std::string_view name);

enum class AttackKind {
  kTypoSwap,
  kTypoDelete,
  kTypoInsert,
  kTypoSubstitute,
  kSynonym,
};

std::string_view AttackKindName(AttackKind k);
std::optional<AttackKind> ParseAttackKind(std::string_view name);
inline bool IsTypo(AttackKind k) { return k != AttackKind::kSynonym; }

struct AttackRecord {
  AttackKind kind = AttackKind::kSynonym;
  std::size_t token_index = 0;
  std::string original;
  std::string replacement;

  bool operator==(const AttackRecord&) const = default;
};

struct Fill {
  std::size_t slot = 0;
  SlotCategory category = SlotCategory::kPerson;
  std::string word;

  bool operator==(const Fill&) const = default;
};

// One member of the generated evaluation set.
struct GeneratedSample {
  std::string id;
  std::string seed_id;
  std::string template_id;
  std::string text;  // after attacks, if any were applied
  std::string label;
  std::vector<Fill> fills;
  std::vector<AttackRecord> attacks;
  std::string rng_trace;  // hex of the per-template fill seed

  bool operator==(const GeneratedSample&) const = default;
};

}  // namespace mstemp

#endif  // MSTEMP_SAMPLE_H_
