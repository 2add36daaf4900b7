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

// Scoring a model under test on labeled prompts, the subsampling estimator
// that puts a large generated set on the same footing as the N-sample seed
// set, and the summary arithmetic (reduction percentage, size multiplier).

#ifndef MSTEMP_HARNESS_H_
#define MSTEMP_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mstemp/corpus.h"
#include "mstemp/lm_client.h"

namespace mstemp {

inline constexpr std::string_view kDefaultTaskPrompt =
    "Classify the sentiment of the following sentence as {labels}. "
    "Sentence: {text} Answer:";

inline constexpr std::string_view kUnparseable = "unparseable";

inline constexpr std::size_t kDefaultFairnessRepeats = 5;

// "positive or negative"; "a, b or c" for three labels. Uses each label's
// first verbalizer.
std::string FormatLabelList(const LabelSpace& space);

// Placeholders: {text}, {labels}.
std::string BuildTaskPrompt(std::string_view text, const LabelSpace& space,
                            std::string_view tmpl = kDefaultTaskPrompt);

// Finds every verbalizer occurrence (case-insensitive, whole words) and
// returns the label of the earliest one; among matches starting at the same
// offset the longest verbalizer wins. kUnparseable when nothing matches.
std::string ParsePrediction(std::string_view raw, const LabelSpace& space);

struct EvalItem {
  std::string sample_id;
  std::string text;
  std::string gold_label;
};

struct Prediction {
  std::string sample_id;
  std::string raw_response;
  std::string parsed_label;  // a label or kUnparseable
  std::string gold_label;
  bool correct = false;      // parsed_label == gold_label
  std::string prompt_sha256;

  bool operator==(const Prediction&) const = default;
};

nlohmann::ordered_json PredictionToJson(const Prediction& p);
Prediction PredictionFromJson(const nlohmann::json& j);

struct EvalOptions {
  std::string prompt_template = std::string(kDefaultTaskPrompt);
  std::size_t workers = 4;
  // When set, predictions are appended here as they complete and the file
  // is rewritten in item order at the end. Rows already present for the
  // same sample id and prompt hash are reused, so an interrupted
  // evaluation resumes where it stopped.
  std::optional<std::filesystem::path> checkpoint;
};

struct EvalResult {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::vector<Prediction> predictions;  // item order
  std::size_t resumed = 0;              // predictions read from checkpoint
};

// Sends one task prompt per item at temperature 0. Registers each prompt
// with `answer_key` (if given) before sending it. Throws ConfigError on an
// empty item list or duplicate sample ids.
EvalResult Evaluate(LanguageModel& model, const std::vector<EvalItem>& items,
                    const LabelSpace& space, AnswerKey* answer_key,
                    const EvalOptions& options = {});

// K subsets of {0..population-1}, each a uniform draw of n distinct indices
// in ascending order. Subset i uses the stream DeriveSeed(seed,
// {"fairness", i}). Throws ConfigError when n > population, n == 0 or k == 0.
std::vector<std::vector<std::size_t>> FairnessSample(std::size_t population,
                                                     std::size_t n,
                                                     std::size_t k,
                                                     std::uint64_t seed);

struct FairnessEstimate {
  std::size_t n = 0;
  std::size_t k = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> subset_accuracies;

  nlohmann::ordered_json ToJson() const;
};

FairnessEstimate EstimateFairness(const std::vector<bool>& correct,
                                  std::size_t n, std::size_t k,
                                  std::uint64_t seed);

// Rounds half away from zero at `decimals` places.
double RoundTo(double x, int decimals);

// 100 * (baseline - mean(accuracies)) / baseline, rounded to 1 decimal.
// Throws ConfigError when baseline <= 0, DegenerateInputError when
// `accuracies` is empty.
double ReductionPercent(double baseline, const std::vector<double>& accuracies);

// generated / baseline_count, rounded to 2 decimals.
double Multiplier(std::size_t generated, std::size_t baseline_count);

struct EvaluatorCell {
  std::string evaluator;
  double accuracy = 0.0;
  std::optional<FairnessEstimate> fairness;
  std::string fairness_note;  // why fairness is absent, if it is
};

struct ModelRow {
  std::string evaluated_model;
  double baseline_accuracy = 0.0;
  std::vector<EvaluatorCell> cells;  // same order as EvalReport::evaluators
  std::optional<double> reduction_percent;  // absent when baseline is 0
};

struct EvalReport {
  std::string task;
  std::vector<std::string> evaluators;
  std::size_t baseline_count = 0;
  std::vector<std::size_t> generated_counts;  // per evaluator
  std::vector<ModelRow> rows;
  std::string manifest;  // path of the run manifest

  nlohmann::ordered_json ToJson() const;
  static EvalReport FromJson(const nlohmann::json& j);

  // Rows are evaluated models, columns the baseline and each evaluator,
  // then a "#Examples" row with size multipliers, followed by the
  // subsampled accuracies.
  std::string RenderTable() const;
};

}  // namespace mstemp

#endif  // MSTEMP_HARNESS_H_
