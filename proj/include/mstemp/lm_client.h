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

// Chat-completion access to the paraphrasing (evaluator) model and the model
// under test.
//
// Wire format (POST to the backend endpoint):
//   {"model": <model_id>,
//    "messages": [{"role": "user", "content": <prompt>}],
//    "temperature": <t>}
// The reply is read from choices[0].message.content.
//
// A completion is identified by (backend name, model id, prompt, draw). The
// draw index distinguishes repeated samples of one prompt, which is how the
// pipeline re-prompts a temperature-1 model without the response cache
// handing back the first answer again.

#ifndef MSTEMP_LM_CLIENT_H_
#define MSTEMP_LM_CLIENT_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "mstemp/corpus.h"
#include "mstemp/http_transport.h"

namespace mstemp {

inline constexpr double kParaphraseTemperature = 1.0;
inline constexpr double kTaskTemperature = 0.0;

struct LmBackend {
  std::string name = "mock";
  std::string kind = "mock";  // "mock" | "http-chat"
  std::string endpoint;
  std::string model_id = "mock";
  double request_timeout_s = 60.0;
  int max_retries = 3;
  double rate_limit = 60.0;  // requests per minute
  double backoff_initial_s = 0.5;
  double backoff_max_s = 30.0;

  // Mock behaviour: "paraphrase", "oracle" (always correct), "flip" (always
  // wrong on a binary task) or "accuracy" (correct with probability
  // mock_accuracy, decided per prompt by a keyed hash).
  std::string mock_mode = "paraphrase";
  double mock_accuracy = 1.0;
  std::uint64_t mock_seed = 0;

  void Validate() const;
  static LmBackend FromJson(const nlohmann::json& j);
  nlohmann::ordered_json ToJson() const;
};

struct CompletionRequest {
  std::string prompt;
  std::size_t draw = 0;
  double temperature = kParaphraseTemperature;
  // Id of the evaluated item, for local test doubles only. Never sent to a
  // backend and not part of any cache key.
  std::string item_id;
};

struct Completion {
  std::string prompt;
  std::string text;  // raw model output
  std::string backend;
  double latency_ms = 0.0;
  int retries = 0;
  bool cached = false;
};

class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  virtual Completion Complete(const CompletionRequest& request) = 0;
  virtual const LmBackend& backend() const = 0;
};

// Gold answers the mock classifier consults. The harness registers each task
// prompt before sending it.
class AnswerKey {
 public:
  explicit AnswerKey(LabelSpace label_space)
      : label_space_(std::move(label_space)) {}

  // Gold is stored per item id when one is given, since two items can share
  // a prompt (identical generated text) yet carry different labels.
  void Register(const std::string& prompt, const std::string& gold_label,
                const std::string& item_id = "");
  std::optional<std::string> Lookup(const std::string& prompt,
                                    const std::string& item_id = "") const;
  const LabelSpace& label_space() const { return label_space_; }

 private:
  LabelSpace label_space_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::string> gold_;
  std::unordered_map<std::string, std::string> gold_by_item_;
};

class HttpChatModel : public LanguageModel {
 public:
  HttpChatModel(LmBackend backend, std::shared_ptr<HttpTransport> transport,
                std::shared_ptr<Clock> clock);

  Completion Complete(const CompletionRequest& request) override;
  const LmBackend& backend() const override { return backend_; }

  static std::string BuildRequestBody(const LmBackend& backend,
                                      const CompletionRequest& request);
  // Throws ProtocolError when the reply lacks choices[0].message.content.
  static std::string ParseResponseBody(const std::string& body);

 private:
  LmBackend backend_;
  std::shared_ptr<HttpTransport> transport_;
  std::shared_ptr<Clock> clock_;
  RateLimiter limiter_;
  std::string api_key_;
};

// Append-only JSONL completion cache:
//   {"key", "backend", "model", "prompt_sha256", "draw", "text"}
class RequestCache {
 public:
  explicit RequestCache(std::filesystem::path path);

  static std::string Key(const std::string& backend, const std::string& model,
                         const std::string& prompt, std::size_t draw);

  std::optional<std::string> Get(const std::string& key) const;
  void Put(const std::string& key, const LmBackend& backend,
           const CompletionRequest& request, const std::string& text);

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::string> entries_;
};

class CachedModel : public LanguageModel {
 public:
  CachedModel(std::unique_ptr<LanguageModel> inner,
              std::shared_ptr<RequestCache> cache);

  Completion Complete(const CompletionRequest& request) override;
  const LmBackend& backend() const override { return inner_->backend(); }

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::unique_ptr<LanguageModel> inner_;
  std::shared_ptr<RequestCache> cache_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

struct ModelFactoryOptions {
  std::optional<std::filesystem::path> cache_dir;  // http backends only
  std::shared_ptr<const AnswerKey> answer_key;     // mock classifiers
  std::shared_ptr<HttpTransport> transport;        // default: cpp-httplib
  std::shared_ptr<Clock> clock;                    // default: system clock
};

std::unique_ptr<LanguageModel> MakeLanguageModel(
    const LmBackend& backend, const ModelFactoryOptions& options = {});

inline constexpr std::string_view kDefaultParaphrasePrompt =
    "Please generate {n} {sentences} with the same semantic meaning as the "
    "following sentence. Try different styles or expressions to make sure "
    "they are different.\n{text}";

// Placeholders: {n}, {sentences} ("sentence" when n == 1), {text}.
std::string BuildParaphrasePrompt(std::string_view text, std::size_t n,
                                  std::string_view tmpl = kDefaultParaphrasePrompt);

// Extracts up to n candidate sentences from a model reply. When any line
// carries a list marker ("1.", "2)", "-", "*", "•"), only marked lines
// count, which drops preambles like "Here are five sentences:". Markers,
// surrounding quotes and blank lines are removed; order is preserved.
std::vector<std::string> ParseCandidates(std::string_view completion_text,
                                         std::size_t n);

}  // namespace mstemp

#endif  // MSTEMP_LM_CLIENT_H_
