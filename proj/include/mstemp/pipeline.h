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

// Staged orchestration. Each stage reads the previous stage's artifact and
// writes its own; `Run` chains all of them. Layout under output_dir:
//
//   <evaluator>/paraphrases.jsonl   raw evaluator replies, draw 0
//   <evaluator>/filtered.jsonl      scored candidates incl. re-prompts
//   <evaluator>/templates.jsonl
//   <evaluator>/samples.jsonl       filled templates
//   <evaluator>/d_prime.jsonl       after attacks (a copy when disabled)
//   <evaluator>/predictions/<model>.jsonl
//   baseline/predictions/<model>.jsonl
//   report.json, report.txt
//   manifest.json
//
// Every artifact is sorted by seed index (then by position within a seed)
// before it is written, so worker scheduling never shows in the output.
// The manifest's "runtime" object holds everything that may legitimately
// differ between two runs of one config: timestamps, cache statistics and
// resume counts.

#ifndef MSTEMP_PIPELINE_H_
#define MSTEMP_PIPELINE_H_

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mstemp/corpus.h"
#include "mstemp/harness.h"
#include "mstemp/http_transport.h"
#include "mstemp/lm_client.h"
#include "mstemp/run_config.h"

namespace mstemp {

enum class Stage {
  kParaphrase,
  kFilter,
  kTemplates,
  kFill,
  kAttack,
  kEvaluate,
  kReport,
};

std::string_view StageName(Stage s);
std::optional<Stage> ParseStage(std::string_view name);

struct PipelineOptions {
  std::shared_ptr<HttpTransport> transport;  // default: cpp-httplib
  std::shared_ptr<Clock> clock;              // default: system clock
  std::ostream* log = nullptr;               // progress lines, if set
};

// Checks the count identities recorded in a manifest; returns one message
// per violation.
std::vector<std::string> ReconcileManifest(const nlohmann::ordered_json& m);

class Pipeline {
 public:
  explicit Pipeline(RunConfig config, PipelineOptions options = {});

  // Throws StageOrderError when an upstream artifact is missing.
  void RunStage(Stage stage);
  EvalReport Run();

  const RunConfig& config() const { return config_; }
  const SeedDataset& dataset() const { return dataset_; }

  std::filesystem::path EvaluatorDir(std::string_view evaluator) const;
  std::filesystem::path ArtifactPath(std::string_view evaluator,
                                     Stage stage) const;
  std::filesystem::path PredictionsPath(std::string_view evaluator_or_baseline,
                                        std::string_view model) const;
  std::filesystem::path ManifestPath() const;
  std::filesystem::path ReportJsonPath() const;
  std::filesystem::path ReportTextPath() const;

  // Reads report.json; StageOrderError if absent.
  EvalReport LoadReport() const;

 private:
  void Paraphrase();
  void Filter();
  void Templates();
  void Fill();
  void Attack();
  void EvaluateModels();
  EvalReport Report();

  std::unique_ptr<LanguageModel> MakeModel(const LmBackend& backend) const;
  void RequireArtifact(const std::filesystem::path& path, Stage producer) const;
  nlohmann::ordered_json LoadManifest() const;
  void SaveManifest(nlohmann::ordered_json manifest, Stage stage) const;
  void Log(const std::string& line) const;

  RunConfig config_;
  PipelineOptions options_;
  SeedDataset dataset_;
  std::string dataset_sha256_;
  std::shared_ptr<AnswerKey> answer_key_;
};

}  // namespace mstemp

#endif  // MSTEMP_PIPELINE_H_
