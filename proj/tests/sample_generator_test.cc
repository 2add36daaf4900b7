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
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "mstemp/errors.h"
#include "mstemp/tagger.h"
#include "mstemp/template_parser.h"
#include "test_util.h"

namespace mstemp {
namespace {

using ::mstemp::testing::Gen;

Template Parse(std::string_view text, std::string_view seed_id = "seed-0",
               SlotPolicy policy = {}) {
  auto tpl = ParseTemplate(text, seed_id, TagLexicon::Default(), policy);
  if (!tpl) throw std::runtime_error("no template for fixture sentence");
  return *tpl;
}

Lexicon BundledLexicon() { return Lexicon::Load(DataDir() / "data" / "lexicon.json"); }

TEST(LexiconTest, BundledListsAreNonEmptyAndDeduplicated) {
  Lexicon lex = BundledLexicon();
  for (SlotCategory c :
       {SlotCategory::kPerson, SlotCategory::kPronoun, SlotCategory::kNoun}) {
    const auto& words = lex.words(c);
    EXPECT_FALSE(words.empty());
    EXPECT_EQ(std::set<std::string>(words.begin(), words.end()).size(),
              words.size());
  }
}

TEST(LexiconTest, DuplicatesAreDroppedOnLoad) {
  Lexicon lex = Lexicon::FromJson(nlohmann::json{{"PERSON", {"Bob", "Bob", "Al"}}});
  EXPECT_EQ(lex.words(SlotCategory::kPerson),
            (std::vector<std::string>{"Bob", "Al"}));
}

TEST(LexiconTest, UnknownCategoryRejected) {
  EXPECT_THROW(Lexicon::FromJson(nlohmann::json{{"ANIMAL", {"cat"}}}),
               ConfigError);
}

TEST(FillTemplateTest, PersonSlotsFromNames) {
  Template tpl = Parse("Bob brings Alice immense joy");
  Lexicon lex({{SlotCategory::kPerson, {"Bob", "Alice", "Jerry", "Maria"}}});
  auto samples = FillTemplate(tpl, "positive", lex, 5, 42);
  ASSERT_FALSE(samples.empty());
  for (const auto& s : samples) {
    EXPECT_EQ(s.label, "positive");
    EXPECT_EQ(s.fills.size(), 2u);
    EXPECT_EQ(s.text, s.fills[0].word + " brings " + s.fills[1].word +
                          " immense joy");
  }
}

TEST(FillTemplateTest, PronounsDrawFromPersonByDefault) {
  Template tpl = Parse("Today brings me immense joy");
  Lexicon lex({{SlotCategory::kPerson, {"Alice"}},
               {SlotCategory::kPronoun, {"them"}}});
  auto samples = FillTemplate(tpl, "positive", lex, 1, 1);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].text, "Today brings Alice immense joy");
  EXPECT_EQ(samples[0].fills[0].category, SlotCategory::kPronoun);

  FillOptions opts;
  opts.pronouns_from_person = false;
  samples = FillTemplate(tpl, "positive", lex, 1, 1, opts);
  EXPECT_EQ(samples[0].text, "Today brings them immense joy");
}

TEST(FillTemplateTest, CapitalizesOnlyAtSentenceStart) {
  Template tpl = Parse("\"she said we won\"");
  FillOptions opts;
  opts.pronouns_from_person = false;
  Lexicon lex({{SlotCategory::kPronoun, {"they"}}});
  auto samples = FillTemplate(tpl, "positive", lex, 1, 1, opts);
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_EQ(samples[0].text, "\"They said they won\"");
}

TEST(FillTemplateTest, SingletonListDedupsToOne) {
  Template tpl = Parse("I am happy");
  Lexicon lex({{SlotCategory::kPerson, {"Bob"}}});
  EXPECT_EQ(FillTemplate(tpl, "positive", lex, 3, 42).size(), 1u);
  FillOptions no_dedup;
  no_dedup.dedup = false;
  EXPECT_EQ(FillTemplate(tpl, "positive", lex, 3, 42, no_dedup).size(), 3u);
}

TEST(FillTemplateTest, FixedSeedIsByteIdentical) {
  Template tpl = Parse("She told me about Peter");
  Lexicon lex = BundledLexicon();
  auto a = FillTemplate(tpl, "negative", lex, 5, 42);
  auto b = FillTemplate(tpl, "negative", lex, 5, 42);
  EXPECT_EQ(a, b);
  auto c = FillTemplate(tpl, "negative", lex, 5, 43);
  EXPECT_NE(a, c);
}

TEST(FillTemplateTest, MissingCategoryNamesCategoryAndTemplate) {
  SlotPolicy policy;
  policy.include_common_nouns = true;
  Template tpl = Parse("The movie was long", "seed-0", policy);
  Lexicon lex({{SlotCategory::kPerson, {"Bob"}}});
  try {
    FillTemplate(tpl, "negative", lex, 2, 1);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    std::string what = e.what();
    EXPECT_NE(what.find("NOUN"), std::string::npos) << what;
    EXPECT_NE(what.find(tpl.template_id), std::string::npos) << what;
  }
}

TEST(FillTemplateTest, ZeroMRejected) {
  EXPECT_THROW(FillTemplate(Parse("I am happy"), "positive", BundledLexicon(),
                            0, 1),
               ConfigError);
}

TEST(FillTemplateTest, RenderConsistencyWithRecordedFills) {
  Lexicon lex = BundledLexicon();
  Gen gen(77);
  SlotPolicy policy;
  policy.include_common_nouns = true;
  for (int i = 0; i < 300; ++i) {
    auto tpl = ParseTemplate(gen.Sentence(), "seed-0", TagLexicon::Default(),
                             policy);
    if (!tpl) continue;
    for (const auto& s : FillTemplate(*tpl, "positive", lex, 4, i)) {
      ASSERT_EQ(RenderWithFills(*tpl, s.fills), s.text);
    }
  }
}

TEST(GenerateSetTest, EmptyTemplatesGiveEmptySet) {
  GeneratedSet set = GenerateSet({}, {}, BundledLexicon(), 5, 42);
  EXPECT_TRUE(set.samples.empty());
  EXPECT_TRUE(set.per_seed.empty());
}

TEST(GenerateSetTest, ThreeTemplatesTimesFour) {
  std::vector<Template> tpls = {Parse("I am happy today", "seed-0"),
                                Parse("She hated every minute", "seed-1"),
                                Parse("We met Maria there", "seed-1")};
  SeedLabels labels = {{"seed-0", "positive"}, {"seed-1", "negative"}};
  GeneratedSet set = GenerateSet(tpls, labels, BundledLexicon(), 4, 42);
  ASSERT_EQ(set.samples.size(), 12u);
  EXPECT_EQ(set.per_seed["seed-0"].requested, 4u);
  EXPECT_EQ(set.per_seed["seed-0"].realized, 4u);
  EXPECT_EQ(set.per_seed["seed-1"].requested, 8u);
  EXPECT_EQ(set.per_seed["seed-1"].realized, 8u);
  // Template input order is preserved.
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(set.samples[i].template_id, tpls[i / 4].template_id);
  }
}

TEST(GenerateSetTest, LabelPropagationAndUniqueIds) {
  Gen gen(123);
  std::vector<Template> tpls;
  SeedLabels labels;
  for (int i = 0; i < 200; ++i) {
    std::string seed_id = "seed-" + std::to_string(i % 17);
    labels[seed_id] = (i % 17) % 2 ? "negative" : "positive";
    auto tpl = ParseTemplate(gen.Sentence(), seed_id, TagLexicon::Default(),
                             SlotPolicy{});
    if (tpl) tpls.push_back(*tpl);
  }
  GeneratedSet set = GenerateSet(tpls, labels, BundledLexicon(), 5, 7);
  std::set<std::string> ids;
  for (const auto& s : set.samples) {
    EXPECT_EQ(s.label, labels.at(s.seed_id));
    EXPECT_TRUE(ids.insert(s.id).second) << s.id;
  }
}

TEST(GenerateSetTest, CountLawWithoutDedup) {
  Gen gen(321);
  std::vector<Template> tpls;
  for (int i = 0; i < 100; ++i) {
    auto tpl = ParseTemplate(gen.Sentence(), "seed-0", TagLexicon::Default(),
                             SlotPolicy{});
    if (tpl) tpls.push_back(*tpl);
  }
  FillOptions opts;
  opts.dedup = false;
  GeneratedSet set =
      GenerateSet(tpls, {{"seed-0", "positive"}}, BundledLexicon(), 3, 1, opts);
  EXPECT_EQ(set.samples.size(), tpls.size() * 3);
}

TEST(GenerateSetTest, AddingATemplateLeavesOthersUntouched) {
  std::vector<Template> tpls = {Parse("I am happy today", "seed-0"),
                                Parse("She hated every minute", "seed-0")};
  SeedLabels labels = {{"seed-0", "positive"}};
  GeneratedSet before = GenerateSet(tpls, labels, BundledLexicon(), 5, 42);
  tpls.insert(tpls.begin(), Parse("They left early", "seed-0"));
  GeneratedSet after = GenerateSet(tpls, labels, BundledLexicon(), 5, 42);
  std::vector<GeneratedSample> tail(after.samples.end() - before.samples.size(),
                                    after.samples.end());
  EXPECT_EQ(tail, before.samples);
}

TEST(GenerateSetTest, UnknownSeedIsConfigError) {
  EXPECT_THROW(GenerateSet({Parse("I am happy", "seed-9")}, {},
                           BundledLexicon(), 1, 1),
               ConfigError);
}

}  // namespace
}  // namespace mstemp
