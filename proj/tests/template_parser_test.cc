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

#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "mstemp/errors.h"
#include "mstemp/tagger.h"
#include "mstemp/tokenizer.h"
#include "test_util.h"

namespace mstemp {
namespace {

using ::mstemp::testing::Gen;
using ::mstemp::testing::TempDir;

std::vector<std::string> Texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const Token& t : tokens) out.push_back(t.text);
  return out;
}

std::vector<PosTag> Tags(std::string_view sentence) {
  std::vector<PosTag> out;
  for (const auto& t : PosTagTokens(Tokenize(sentence), TagLexicon::Default())) {
    out.push_back(t.tag);
  }
  return out;
}

TEST(TokenizeTest, SplitsTrailingPunctuation) {
  EXPECT_EQ(Texts(Tokenize("Today brings me immense joy.")),
            (std::vector<std::string>{"Today", "brings", "me", "immense", "joy",
                                      "."}));
}

TEST(TokenizeTest, EmptyInput) { EXPECT_TRUE(Tokenize("").empty()); }

TEST(TokenizeTest, PossessiveClitic) {
  EXPECT_EQ(Texts(Tokenize("Bob's joy")),
            (std::vector<std::string>{"Bob", "'s", "joy"}));
}

TEST(TokenizeTest, NegationClitic) {
  EXPECT_EQ(Texts(Tokenize("It isn't bad")),
            (std::vector<std::string>{"It", "is", "n't", "bad"}));
}

TEST(TokenizeTest, SpansAreLosslessOverRandomSentences) {
  Gen gen(11);
  for (int i = 0; i < 2000; ++i) {
    const std::string s = gen.Sentence();
    std::size_t pos = 0;
    for (const Token& t : Tokenize(s)) {
      ASSERT_LE(pos, t.begin) << s;
      for (std::size_t k = pos; k < t.begin; ++k) {
        ASSERT_TRUE(s[k] == ' ' || s[k] == '\t' || s[k] == '\n') << s;
      }
      ASSERT_EQ(s.substr(t.begin, t.end - t.begin), t.text) << s;
      ASSERT_LT(t.begin, t.end) << s;
      pos = t.end;
    }
    for (std::size_t k = pos; k < s.size(); ++k) {
      ASSERT_TRUE(s[k] == ' ' || s[k] == '\t' || s[k] == '\n') << s;
    }
  }
}

TEST(PosTagTest, PaperSentence) {
  EXPECT_EQ(Tags("Today brings me immense joy"),
            (std::vector<PosTag>{PosTag::kNoun, PosTag::kVerb, PosTag::kPronoun,
                                 PosTag::kAdjective, PosTag::kNoun}));
}

TEST(PosTagTest, CapitalizedMidSentenceIsProperNoun) {
  EXPECT_EQ(Tags("I met Bob")[2], PosTag::kProperNoun);
  // Unknown capitalized word, not sentence-initial.
  EXPECT_EQ(Tags("I met Zorblat")[2], PosTag::kProperNoun);
}

TEST(PosTagTest, ClosedClassWords) {
  EXPECT_EQ(Tags("the")[0], PosTag::kDeterminer);
  EXPECT_EQ(Tags("The cat")[0], PosTag::kDeterminer);
  EXPECT_EQ(Tags("sit on it")[1], PosTag::kPreposition);
}

TEST(PosTagTest, PunctuationAndNumbersAreOther) {
  std::vector<PosTag> tags = Tags("Wow , 42 !");
  EXPECT_EQ(tags[1], PosTag::kOther);
  EXPECT_EQ(tags[2], PosTag::kOther);
  EXPECT_EQ(tags[3], PosTag::kOther);
}

TEST(PosTagTest, UnknownLowercaseFallsBackToOpenClass) {
  // Suffix rules decide; nothing may come back as a closed class.
  for (const char* w : {"blorpness", "zindly", "frobbed"}) {
    PosTag t = Tags(w)[0];
    EXPECT_TRUE(t == PosTag::kNoun || t == PosTag::kVerb ||
                t == PosTag::kAdjective || t == PosTag::kAdverb)
        << w;
  }
  EXPECT_EQ(Tags("zindly")[0], PosTag::kAdverb);
}

TEST(PosTagTest, BundledLexiconIsLarge) {
  EXPECT_GT(TagLexicon::Default().size(), 40000u);
}

TEST(ExtractTemplateTest, DefaultPolicySlotsPronoun) {
  auto tpl = ParseTemplate("Today brings me immense joy", "seed-0",
                           TagLexicon::Default(), SlotPolicy{});
  ASSERT_TRUE(tpl.has_value());
  EXPECT_EQ(tpl->Pattern(), "Today brings [x] immense joy");
  ASSERT_EQ(tpl->slot_count(), 1u);
  EXPECT_EQ(tpl->slots()[0]->category, SlotCategory::kPronoun);
  EXPECT_EQ(tpl->slots()[0]->original, "me");
  EXPECT_EQ(tpl->seed_id, "seed-0");
}

TEST(ExtractTemplateTest, ProperNounBecomesPersonSlot) {
  auto tpl = ParseTemplate("Bob brings Alice immense joy", "s",
                           TagLexicon::Default(), SlotPolicy{});
  ASSERT_TRUE(tpl.has_value());
  EXPECT_EQ(tpl->Pattern(), "[x] brings [x] immense joy");
  for (const SlotSegment* s : tpl->slots()) {
    EXPECT_EQ(s->category, SlotCategory::kPerson);
  }
}

TEST(ExtractTemplateTest, NoEligibleWordsGivesNone) {
  EXPECT_FALSE(ParseTemplate("The weather was lovely.", "s",
                             TagLexicon::Default(), SlotPolicy{})
                   .has_value());
}

TEST(ExtractTemplateTest, CommonNounSlotsWhenEnabled) {
  SlotPolicy policy;
  policy.include_common_nouns = true;
  auto tpl = ParseTemplate("My heart is filled with happiness on this day", "s",
                           TagLexicon::Default(), policy);
  ASSERT_TRUE(tpl.has_value());
  std::vector<std::string> originals;
  for (const SlotSegment* s : tpl->slots()) {
    EXPECT_EQ(s->category, SlotCategory::kNoun);
    originals.push_back(s->original);
  }
  EXPECT_EQ(originals, (std::vector<std::string>{"heart", "happiness", "day"}));
}

TEST(ExtractTemplateTest, MaxSlotsKeepsEarliest) {
  SlotPolicy policy;
  policy.max_slots = 2;
  auto tpl = ParseTemplate("I told you that she saw them", "s",
                           TagLexicon::Default(), policy);
  ASSERT_TRUE(tpl.has_value());
  ASSERT_EQ(tpl->slot_count(), 2u);
  EXPECT_EQ(tpl->slots()[0]->original, "I");
  EXPECT_EQ(tpl->slots()[1]->original, "you");
}

TEST(ExtractTemplateTest, SlotsNeverCoverPunctuation) {
  Gen gen(5);
  SlotPolicy policy;
  policy.include_common_nouns = true;
  policy.max_slots = 100;
  for (int i = 0; i < 1000; ++i) {
    const std::string s = gen.Sentence();
    auto tpl = ParseTemplate(s, "s", TagLexicon::Default(), policy);
    if (!tpl) continue;
    for (const SlotSegment* slot : tpl->slots()) {
      ASSERT_TRUE(IsWordToken(slot->original)) << s;
    }
  }
}

TEST(ExtractTemplateTest, SlotCountMatchesEligibleTags) {
  Gen gen(9);
  SlotPolicy policy;
  policy.max_slots = 100;
  for (int i = 0; i < 1000; ++i) {
    const std::string s = gen.Sentence();
    std::size_t eligible = 0;
    for (PosTag t : Tags(s)) {
      if (t == PosTag::kPronoun || t == PosTag::kProperNoun) ++eligible;
    }
    auto tpl = ParseTemplate(s, "s", TagLexicon::Default(), policy);
    ASSERT_EQ(tpl ? tpl->slot_count() : 0u, eligible) << s;
  }
}

TEST(ExtractTemplateTest, PureFunctionIncludingId) {
  auto a = ParseTemplate("She loved it", "seed-3", TagLexicon::Default(),
                         SlotPolicy{});
  auto b = ParseTemplate("She loved it", "seed-3", TagLexicon::Default(),
                         SlotPolicy{});
  ASSERT_TRUE(a && b);
  EXPECT_EQ(*a, *b);
  // The id depends on the seed and on the policy.
  auto c = ParseTemplate("She loved it", "seed-4", TagLexicon::Default(),
                         SlotPolicy{});
  SlotPolicy other;
  other.max_slots = 1;
  auto d = ParseTemplate("She loved it", "seed-3", TagLexicon::Default(), other);
  EXPECT_NE(a->template_id, c->template_id);
  EXPECT_NE(a->template_id, d->template_id);
}

TEST(ExtractTemplateTest, ReconstructionOverRandomSentences) {
  Gen gen(2027);
  SlotPolicy policy;
  policy.include_common_nouns = true;
  for (int i = 0; i < 1000; ++i) {
    const std::string s = gen.Sentence();
    auto tpl = ParseTemplate(s, "s", TagLexicon::Default(), policy);
    if (!tpl) continue;
    ASSERT_EQ(RenderOriginal(*tpl), s);
    ASSERT_EQ(tpl->source_text, s);
  }
}

TEST(RenderTemplateTest, WordCountMustMatch) {
  auto tpl = ParseTemplate("I like you", "s", TagLexicon::Default(),
                           SlotPolicy{});
  ASSERT_TRUE(tpl.has_value());
  EXPECT_EQ(RenderTemplate(*tpl, {"Bob", "Alice"}), "Bob like Alice");
  EXPECT_THROW(RenderTemplate(*tpl, {"Bob"}), ConfigError);
}

TEST(TemplateIoTest, JsonlRoundTrip) {
  TempDir dir;
  std::vector<Template> tpls;
  for (const char* s : {"I am happy today.", "Maria met Peter twice.",
                        "They said \"no\" to us!"}) {
    auto t = ParseTemplate(s, "seed-1", TagLexicon::Default(), SlotPolicy{});
    ASSERT_TRUE(t.has_value()) << s;
    tpls.push_back(*t);
  }
  WriteTemplates(tpls, dir / "t.jsonl");
  EXPECT_EQ(ReadTemplates(dir / "t.jsonl"), tpls);
}

TEST(SlotPolicyTest, JsonRoundTrip) {
  SlotPolicy p;
  p.include_common_nouns = true;
  p.max_slots = 3;
  SlotPolicy back = SlotPolicy::FromJson(nlohmann::json::parse(p.ToJson().dump()));
  EXPECT_EQ(back.Fingerprint(), p.Fingerprint());
  EXPECT_THROW(
      SlotPolicy::FromJson(nlohmann::json{{"tags", {{"pronoun", "ANIMAL"}}}}),
      ConfigError);
}

}  // namespace
}  // namespace mstemp
