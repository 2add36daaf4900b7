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

#include "mstemp/lm_client.h"

#include <cctype>
#include <chrono>

#include "mstemp/errors.h"
#include "mstemp/hashing.h"
#include "mstemp/mock_lm.h"
#include "mstemp/text_util.h"

namespace mstemp {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

Duration Seconds(double s) {
  return std::chrono::duration_cast<Duration>(std::chrono::duration<double>(s));
}

}  // namespace

void LmBackend::Validate() const {
  if (name.empty()) throw ConfigError("backend name must not be empty");
  if (max_retries < 0) throw ConfigError("backend " + name + ": max_retries < 0");
  if (kind == "http-chat") {
    if (endpoint.empty()) {
      throw ConfigError("backend " + name + ": http-chat needs an endpoint");
    }
    if (!(rate_limit > 0)) {
      throw ConfigError("backend " + name + ": rate_limit must be > 0");
    }
    if (!(request_timeout_s > 0)) {
      throw ConfigError("backend " + name + ": request_timeout must be > 0");
    }
  } else if (kind == "mock") {
    if (mock_mode != "paraphrase" && mock_mode != "oracle" &&
        mock_mode != "flip" && mock_mode != "accuracy") {
      throw ConfigError("backend " + name + ": unknown mock_mode '" +
                        mock_mode + "'");
    }
    if (!(mock_accuracy >= 0.0 && mock_accuracy <= 1.0)) {
      throw ConfigError("backend " + name + ": mock_accuracy outside [0, 1]");
    }
  } else {
    throw ConfigError("backend " + name + ": unknown kind '" + kind + "'");
  }
}

LmBackend LmBackend::FromJson(const json& j) {
  LmBackend b;
  try {
    b.name = j.value("name", b.name);
    b.kind = j.value("kind", b.kind);
    b.endpoint = j.value("endpoint", b.endpoint);
    b.model_id = j.value("model_id", b.model_id);
    b.request_timeout_s = j.value("request_timeout", b.request_timeout_s);
    b.max_retries = j.value("max_retries", b.max_retries);
    b.rate_limit = j.value("rate_limit", b.rate_limit);
    b.backoff_initial_s = j.value("backoff_initial", b.backoff_initial_s);
    b.backoff_max_s = j.value("backoff_max", b.backoff_max_s);
    b.mock_mode = j.value("mock_mode", b.mock_mode);
    b.mock_accuracy = j.value("mock_accuracy", b.mock_accuracy);
    b.mock_seed = j.value("mock_seed", b.mock_seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("backend: ") + e.what());
  }
  if (j.contains("api_key")) {
    throw ConfigError("backend " + b.name +
                      ": API keys are read from MSTEMP_API_KEY[_<NAME>], not "
                      "from config files");
  }
  b.Validate();
  return b;
}

ordered_json LmBackend::ToJson() const {
  ordered_json j;
  j["name"] = name;
  j["kind"] = kind;
  j["endpoint"] = endpoint;
  j["model_id"] = model_id;
  j["request_timeout"] = request_timeout_s;
  j["max_retries"] = max_retries;
  j["rate_limit"] = rate_limit;
  j["backoff_initial"] = backoff_initial_s;
  j["backoff_max"] = backoff_max_s;
  j["mock_mode"] = mock_mode;
  j["mock_accuracy"] = mock_accuracy;
  j["mock_seed"] = mock_seed;
  return j;
}

// ---------------------------------------------------------------------------

void AnswerKey::Register(const std::string& prompt,
                         const std::string& gold_label,
                         const std::string& item_id) {
  std::lock_guard<std::mutex> lock(mu_);
  gold_.emplace(prompt, gold_label);
  if (!item_id.empty()) gold_by_item_[item_id] = gold_label;
}

std::optional<std::string> AnswerKey::Lookup(const std::string& prompt,
                                             const std::string& item_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!item_id.empty()) {
    auto by_item = gold_by_item_.find(item_id);
    if (by_item != gold_by_item_.end()) return by_item->second;
  }
  auto it = gold_.find(prompt);
  if (it == gold_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------

HttpChatModel::HttpChatModel(LmBackend backend,
                             std::shared_ptr<HttpTransport> transport,
                             std::shared_ptr<Clock> clock)
    : backend_(std::move(backend)),
      transport_(std::move(transport)),
      clock_(std::move(clock)),
      limiter_(backend_.rate_limit, clock_),
      api_key_(ApiKeyFor(backend_.name)) {}

std::string HttpChatModel::BuildRequestBody(const LmBackend& backend,
                                            const CompletionRequest& request) {
  ordered_json body;
  body["model"] = backend.model_id;
  body["messages"] = ordered_json::array(
      {ordered_json{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  return body.dump();
}

std::string HttpChatModel::ParseResponseBody(const std::string& body) {
  try {
    json j = json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    std::string excerpt = body.substr(0, 200);
    throw ProtocolError(200, excerpt,
                        std::string("malformed chat completion: ") + e.what());
  }
}

Completion HttpChatModel::Complete(const CompletionRequest& request) {
  std::map<std::string, std::string> headers;
  if (!api_key_.empty()) headers["Authorization"] = "Bearer " + api_key_;
  RetryPolicy policy{backend_.max_retries, Seconds(backend_.backoff_initial_s),
                     Seconds(backend_.backoff_max_s)};
  const Duration start = clock_->Now();
  RetryOutcome outcome = PostWithRetry(
      *transport_, *clock_, &limiter_, policy, backend_.endpoint, headers,
      BuildRequestBody(backend_, request), Seconds(backend_.request_timeout_s));
  Completion c;
  c.prompt = request.prompt;
  c.text = ParseResponseBody(outcome.response.body);
  c.backend = backend_.name;
  c.latency_ms =
      std::chrono::duration<double, std::milli>(clock_->Now() - start).count();
  c.retries = outcome.retries;
  return c;
}

// ---------------------------------------------------------------------------

RequestCache::RequestCache(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  std::vector<std::string> lines = SplitLines(ReadFile(path_));
  for (const auto& line : lines) {
    if (Trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      entries_[j.at("key").get<std::string>()] = j.at("text").get<std::string>();
    } catch (const json::exception&) {
      // A torn final line from an interrupted run; later lines still count.
      continue;
    }
  }
}

std::string RequestCache::Key(const std::string& backend,
                              const std::string& model,
                              const std::string& prompt, std::size_t draw) {
  return HashFieldsHex({backend, model, Sha256Hex(prompt), std::to_string(draw)},
                       32);
}

std::optional<std::string> RequestCache::Get(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void RequestCache::Put(const std::string& key, const LmBackend& backend,
                       const CompletionRequest& request,
                       const std::string& text) {
  ordered_json j;
  j["key"] = key;
  j["backend"] = backend.name;
  j["model"] = backend.model_id;
  j["prompt_sha256"] = Sha256Hex(request.prompt);
  j["draw"] = request.draw;
  j["text"] = text;
  std::lock_guard<std::mutex> lock(mu_);
  if (path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot append to cache " + path_.string());
  out << j.dump() << '\n';
  out.flush();
  entries_[key] = text;
}

CachedModel::CachedModel(std::unique_ptr<LanguageModel> inner,
                         std::shared_ptr<RequestCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

Completion CachedModel::Complete(const CompletionRequest& request) {
  const LmBackend& b = inner_->backend();
  const std::string key =
      RequestCache::Key(b.name, b.model_id, request.prompt, request.draw);
  if (auto text = cache_->Get(key)) {
    ++hits_;
    Completion c;
    c.prompt = request.prompt;
    c.text = *text;
    c.backend = b.name;
    c.cached = true;
    return c;
  }
  ++misses_;
  Completion c = inner_->Complete(request);
  cache_->Put(key, b, request, c.text);
  return c;
}

std::unique_ptr<LanguageModel> MakeLanguageModel(
    const LmBackend& backend, const ModelFactoryOptions& options) {
  backend.Validate();
  if (backend.kind == "mock") {
    return std::make_unique<MockLanguageModel>(backend, options.answer_key);
  }
  auto transport = options.transport ? options.transport
                                     : std::make_shared<HttplibTransport>();
  auto clock = options.clock ? options.clock : SystemClock::Instance();
  std::unique_ptr<LanguageModel> model =
      std::make_unique<HttpChatModel>(backend, transport, clock);
  if (options.cache_dir) {
    auto cache = std::make_shared<RequestCache>(*options.cache_dir /
                                                ("lm-" + backend.name + ".jsonl"));
    model = std::make_unique<CachedModel>(std::move(model), cache);
  }
  return model;
}

// ---------------------------------------------------------------------------

std::string BuildParaphrasePrompt(std::string_view text, std::size_t n,
                                  std::string_view tmpl) {
  if (n == 0) throw ConfigError("paraphrase count n must be >= 1");
  return RenderPlaceholders(tmpl, [&](std::string_view name, std::string* out) {
    if (name == "n") {
      *out = std::to_string(n);
    } else if (name == "sentences") {
      *out = n == 1 ? "sentence" : "sentences";
    } else if (name == "text") {
      *out = std::string(text);
    } else {
      return false;
    }
    return true;
  });
}

namespace {

// Length of a leading list marker plus following spaces, or 0.
std::size_t ListMarkerLength(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')') &&
      (i + 1 == line.size() || line[i + 1] == ' ' || line[i + 1] == '\t')) {
    ++i;
  } else if (line.starts_with("- ") || line.starts_with("* ")) {
    i = 1;
  } else if (line.starts_with("•")) {
    i = std::string_view("•").size();
  } else {
    return 0;
  }
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  return i;
}

std::string_view StripQuotes(std::string_view s) {
  static constexpr std::pair<std::string_view, std::string_view> kPairs[] = {
      {"\"", "\""}, {"'", "'"}, {"“", "”"}, {"‘", "’"}, {"«", "»"}};
  for (const auto& [open, close] : kPairs) {
    if (s.size() >= open.size() + close.size() && s.starts_with(open) &&
        s.ends_with(close)) {
      return Trim(s.substr(open.size(), s.size() - open.size() - close.size()));
    }
  }
  return s;
}

}  // namespace

std::vector<std::string> ParseCandidates(std::string_view completion_text,
                                         std::size_t n) {
  std::vector<std::string> lines = SplitLines(completion_text);
  bool any_marked = false;
  for (const auto& l : lines) {
    if (ListMarkerLength(Trim(l)) > 0) any_marked = true;
  }
  std::vector<std::string> out;
  for (const auto& l : lines) {
    if (out.size() >= n) break;
    std::string_view line = Trim(l);
    if (line.empty()) continue;
    std::size_t marker = ListMarkerLength(line);
    if (any_marked && marker == 0) continue;
    line = StripQuotes(Trim(line.substr(marker)));
    if (line.empty()) continue;
    out.emplace_back(line);
  }
  return out;
}

}  // namespace mstemp
