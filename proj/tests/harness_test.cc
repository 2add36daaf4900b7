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

#include "mstemp/harness.h"

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "mstemp/errors.h"
#include "mstemp/hashing.h"
#include "mstemp/lm_client.h"
#include "mstemp/text_util.h"
#include "test_util.h"

namespace mstemp {
namespace {

using ::mstemp::testing::Gen;
using ::mstemp::testing::Slurp;
using ::mstemp::testing::TempDir;

LabelSpace ThreeWay() {
  return LabelSpace("stance", {"favor", "against", "neutral"},
                    {{"favor", {"favor", "support"}},
                     {"against", {"against", "oppose"}},
                     {"neutral", {"neutral", "none"}}});
}

std::vector<EvalItem> Items(std::size_t count) {
  std::vector<EvalItem> items;
  for (std::size_t i = 0; i < count; ++i) {
    items.push_back({"s-" + std::to_string(i), "Sentence number " + std::to_string(i),
                     i % 2 ? "negative" : "positive"});
  }
  return items;
}

TEST(TaskPromptTest, DefaultTemplate) {
  EXPECT_EQ(BuildTaskPrompt("I am happy today.", BinarySentimentLabelSpace()),
            "Classify the sentiment of the following sentence as positive or "
            "negative. Sentence: I am happy today. Answer:");
}

TEST(TaskPromptTest, CustomTemplateAndThreeLabels) {
  EXPECT_EQ(BuildTaskPrompt("x", ThreeWay(), "[{labels}] {text}"),
            "[favor, against or neutral] x");
  std::string p = BuildTaskPrompt("x", ThreeWay());
  for (const char* l : {"favor", "against", "neutral"}) {
    EXPECT_NE(p.find(l), std::string::npos);
  }
}

TEST(ParsePredictionTest, Examples) {
  LabelSpace space = BinarySentimentLabelSpace();
  EXPECT_EQ(ParsePrediction("Positive.", space), "positive");
  EXPECT_EQ(ParsePrediction("The sentiment is negative overall", space),
            "negative");
  EXPECT_EQ(ParsePrediction("I cannot decide", space), kUnparseable);
  EXPECT_EQ(ParsePrediction("", space), kUnparseable);
}

TEST(ParsePredictionTest, EarliestMatchWinsAndWordBoundaries) {
  LabelSpace space = BinarySentimentLabelSpace();
  EXPECT_EQ(ParsePrediction("negative, not positive", space), "negative");
  EXPECT_EQ(ParsePrediction("NOT POSITIVE but NEGATIVE", space), "positive");
  // Substrings inside longer words do not count.
  EXPECT_EQ(ParsePrediction("positively nonnegative", space), kUnparseable);
  EXPECT_EQ(ParsePrediction("Answer: oppose", ThreeWay()), "against");
}

TEST(EvaluateTest, OracleAndFlipMocks) {
  LabelSpace space = BinarySentimentLabelSpace();
  auto key = std::make_shared<AnswerKey>(space);
  ModelFactoryOptions opts;
  opts.answer_key = key;
  LmBackend oracle;
  oracle.mock_mode = "oracle";
  auto o = MakeLanguageModel(oracle, opts);
  EvalResult r = Evaluate(*o, Items(40), space, key.get());
  EXPECT_EQ(r.accuracy, 1.0);
  EXPECT_EQ(r.correct, 40u);
  ASSERT_EQ(r.predictions.size(), 40u);
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_EQ(r.predictions[i].sample_id, "s-" + std::to_string(i));
  }

  LmBackend flip;
  flip.mock_mode = "flip";
  auto f = MakeLanguageModel(flip, opts);
  EXPECT_EQ(Evaluate(*f, Items(40), space, key.get()).accuracy, 0.0);
}

TEST(EvaluateTest, OracleHandlesSharedTextWithDifferentGold) {
  // A generated sentence can come out identical for a positive and a
  // negative seed; the oracle still answers each item by its own gold.
  LabelSpace space = BinarySentimentLabelSpace();
  auto key = std::make_shared<AnswerKey>(space);
  ModelFactoryOptions opts;
  opts.answer_key = key;
  LmBackend oracle;
  oracle.mock_mode = "oracle";
  auto o = MakeLanguageModel(oracle, opts);
  std::vector<EvalItem> items = {{"a", "He parked the car.", "positive"},
                                 {"b", "He parked the car.", "negative"}};
  EXPECT_EQ(Evaluate(*o, items, space, key.get()).accuracy, 1.0);
}

TEST(EvaluateTest, CorrectMeansParsedEqualsGold) {
  LabelSpace space = BinarySentimentLabelSpace();
  auto key = std::make_shared<AnswerKey>(space);
  LmBackend b;
  b.mock_mode = "accuracy";
  b.mock_accuracy = 0.5;
  ModelFactoryOptions opts;
  opts.answer_key = key;
  auto model = MakeLanguageModel(b, opts);
  EvalResult r = Evaluate(*model, Items(200), space, key.get());
  std::size_t correct = 0;
  for (const auto& p : r.predictions) {
    EXPECT_EQ(p.correct, p.parsed_label == p.gold_label);
    correct += p.correct;
  }
  EXPECT_EQ(correct, r.correct);
  EXPECT_DOUBLE_EQ(r.accuracy, static_cast<double>(correct) / 200.0);
}

TEST(EvaluateTest, AccuracyInvariantUnderPermutation) {
  LabelSpace space = BinarySentimentLabelSpace();
  auto key = std::make_shared<AnswerKey>(space);
  LmBackend b;
  b.mock_mode = "accuracy";
  b.mock_accuracy = 0.7;
  ModelFactoryOptions opts;
  opts.answer_key = key;
  auto model = MakeLanguageModel(b, opts);
  auto items = Items(300);
  double a = Evaluate(*model, items, space, key.get()).accuracy;
  std::reverse(items.begin(), items.end());
  EXPECT_EQ(Evaluate(*model, items, space, key.get()).accuracy, a);
}

TEST(EvaluateTest, EmptyItemsRejected) {
  LabelSpace space = BinarySentimentLabelSpace();
  auto key = std::make_shared<AnswerKey>(space);
  LmBackend b;
  b.mock_mode = "oracle";
  ModelFactoryOptions opts;
  opts.answer_key = key;
  auto model = MakeLanguageModel(b, opts);
  EXPECT_THROW(Evaluate(*model, {}, space, key.get()), ConfigError);
}

// Fails every call after the first `budget` ones.
class FlakyModel : public LanguageModel {
 public:
  FlakyModel(std::unique_ptr<LanguageModel> inner, int budget)
      : inner_(std::move(inner)), budget_(budget) {}
  Completion Complete(const CompletionRequest& r) override {
    if (budget_-- <= 0) throw TransportError("link down");
    ++calls;
    return inner_->Complete(r);
  }
  const LmBackend& backend() const override { return inner_->backend(); }
  std::atomic<int> calls{0};

 private:
  std::unique_ptr<LanguageModel> inner_;
  std::atomic<int> budget_;
};

TEST(EvaluateTest, CheckpointResumesAfterTransportFailure) {
  TempDir dir;
  LabelSpace space = BinarySentimentLabelSpace();
  auto key = std::make_shared<AnswerKey>(space);
  LmBackend b;
  b.mock_mode = "oracle";
  ModelFactoryOptions opts;
  opts.answer_key = key;
  EvalOptions eval;
  eval.checkpoint = dir / "pred.jsonl";
  eval.workers = 1;
  auto items = Items(30);

  FlakyModel flaky(MakeLanguageModel(b, opts), 12);
  EXPECT_THROW(Evaluate(flaky, items, space, key.get(), eval), TransportError);
  EXPECT_FALSE(Slurp(dir / "pred.jsonl").empty());

  FlakyModel resumed(MakeLanguageModel(b, opts), 1000);
  EvalResult r = Evaluate(resumed, items, space, key.get(), eval);
  EXPECT_EQ(r.resumed, 12u);
  EXPECT_EQ(resumed.calls.load(), 18);
  EXPECT_EQ(r.accuracy, 1.0);

  // The final checkpoint is in item order and equals a fresh run's output.
  TempDir fresh;
  EvalOptions fresh_eval = eval;
  fresh_eval.checkpoint = fresh / "pred.jsonl";
  auto model = MakeLanguageModel(b, opts);
  Evaluate(*model, items, space, key.get(), fresh_eval);
  EXPECT_EQ(Slurp(dir / "pred.jsonl"), Slurp(fresh / "pred.jsonl"));
}

TEST(PredictionJsonTest, RoundTrip) {
  Prediction p{"id", "Positive.", "positive", "negative", false, "abc"};
  EXPECT_EQ(PredictionFromJson(nlohmann::json::parse(PredictionToJson(p).dump())),
            p);
}

TEST(FairnessSampleTest, FullDrawIsWholeSet) {
  auto subsets = FairnessSample(50, 50, 3, 9);
  ASSERT_EQ(subsets.size(), 3u);
  for (const auto& s : subsets) {
    std::vector<std::size_t> all(50);
    for (std::size_t i = 0; i < 50; ++i) all[i] = i;
    EXPECT_EQ(s, all);
  }
}

TEST(FairnessSampleTest, DeterministicDistinctAndInRange) {
  EXPECT_EQ(FairnessSample(1000, 100, 1, 4), FairnessSample(1000, 100, 1, 4));
  EXPECT_NE(FairnessSample(1000, 100, 1, 4), FairnessSample(1000, 100, 1, 5));
  for (const auto& s : FairnessSample(1000, 100, 20, 4)) {
    ASSERT_EQ(s.size(), 100u);
    ASSERT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 100u);
    ASSERT_LT(s.back(), 1000u);
  }
}

TEST(FairnessSampleTest, SizeErrors) {
  EXPECT_THROW(FairnessSample(10, 11, 1, 1), ConfigError);
  EXPECT_THROW(FairnessSample(10, 0, 1, 1), ConfigError);
  EXPECT_THROW(FairnessSample(10, 5, 0, 1), ConfigError);
}

TEST(FairnessSampleTest, InclusionIsRoughlyUniform) {
  std::vector<int> hits(200, 0);
  for (const auto& s : FairnessSample(200, 50, 2000, 77)) {
    for (std::size_t i : s) ++hits[i];
  }
  // Expected 500 per index; binomial sd about 19.4.
  for (int h : hits) {
    ASSERT_GT(h, 400);
    ASSERT_LT(h, 600);
  }
}

TEST(EstimateFairnessTest, MeanBetweenMinAndMax) {
  Gen gen(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<bool> correct(20 + gen.Below(200));
    for (std::size_t i = 0; i < correct.size(); ++i) correct[i] = gen.Chance(0.6);
    const std::size_t n = 1 + gen.Below(correct.size());
    FairnessEstimate e = EstimateFairness(correct, n, 1 + gen.Below(10), trial);
    ASSERT_LE(e.min, e.mean + 1e-12);
    ASSERT_LE(e.mean, e.max + 1e-12);
    ASSERT_EQ(e.subset_accuracies.size(), e.k);
  }
}

TEST(ArithmeticTest, ReductionPercentReportedValues) {
  EXPECT_EQ(ReductionPercent(0.939, {0.877, 0.890}), 5.9);
  EXPECT_EQ(ReductionPercent(0.813, {0.717, 0.709}), 12.3);
  for (double x : {0.1, 0.5, 0.939, 1.0}) {
    EXPECT_EQ(ReductionPercent(x, {x}), 0.0);
  }
  EXPECT_THROW(ReductionPercent(0.9, {}), DegenerateInputError);
  EXPECT_THROW(ReductionPercent(0.0, {0.5}), ConfigError);
}

TEST(ArithmeticTest, MultiplierReportedValues) {
  EXPECT_EQ(Multiplier(4081, 872), 4.68);
  EXPECT_EQ(Multiplier(4047, 872), 4.64);
  EXPECT_EQ(Multiplier(250, 10), 25.0);
  EXPECT_THROW(Multiplier(1, 0), DegenerateInputError);
}

EvalReport TableOneShape() {
  EvalReport r;
  r.task = "sst2-sentiment";
  r.evaluators = {"Llama2-13b", "ChatGPT"};
  r.baseline_count = 872;
  r.generated_counts = {4081, 4047};
  ModelRow flan{"Flan-T5-Large", 0.939, {{"Llama2-13b", 0.877}, {"ChatGPT", 0.890}},
                ReductionPercent(0.939, {0.877, 0.890})};
  ModelRow llama{"Llama2-7b", 0.813, {{"Llama2-13b", 0.717}, {"ChatGPT", 0.709}},
                 ReductionPercent(0.813, {0.717, 0.709})};
  r.rows = {flan, llama};
  r.manifest = "manifest.json";
  return r;
}

TEST(EvalReportTest, RenderedTableMirrorsLayout) {
  const std::string table = TableOneShape().RenderTable();
  std::vector<std::string> lines = SplitLines(table);
  ASSERT_GE(lines.size(), 5u);
  for (const char* h : {"Evaluated LLM", "Baseline", "Llama2-13b", "ChatGPT"}) {
    EXPECT_NE(lines[0].find(h), std::string::npos) << lines[0];
  }
  EXPECT_NE(table.find("0.939"), std::string::npos);
  EXPECT_NE(table.find("5.9"), std::string::npos);
  EXPECT_NE(table.find("12.3"), std::string::npos);
  EXPECT_NE(table.find("4081(4.68x)"), std::string::npos) << table;
  EXPECT_NE(table.find("4047(4.64x)"), std::string::npos) << table;
  EXPECT_NE(table.find("#Examples"), std::string::npos);
}

TEST(EvalReportTest, JsonRoundTrip) {
  EvalReport r = TableOneShape();
  FairnessEstimate f;
  f.n = 872;
  f.k = 5;
  f.mean = 0.88;
  f.min = 0.87;
  f.max = 0.89;
  f.subset_accuracies = {0.87, 0.88, 0.88, 0.88, 0.89};
  r.rows[0].cells[0].fairness = f;
  r.rows[1].cells[1].fairness_note = "too few samples";
  r.rows[1].reduction_percent.reset();
  nlohmann::ordered_json j = r.ToJson();
  EvalReport back = EvalReport::FromJson(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.ToJson().dump(), j.dump());
  EXPECT_EQ(j["sample_counts"]["generated"][0]["multiplier"], 4.68);
  EXPECT_TRUE(j["rows"][1]["reduction_percent"].is_null());
  EXPECT_NE(r.RenderTable().find("n/a"), std::string::npos);
}

}  // namespace
}  // namespace mstemp
