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

#include "mstemp/semantic_filter.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "mstemp/errors.h"
#include "mstemp/hashing.h"
#include "mstemp/text_util.h"
#include "mstemp/tokenizer.h"

namespace mstemp {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

Duration Seconds(double s) {
  return std::chrono::duration_cast<Duration>(std::chrono::duration<double>(s));
}

void RequireText(std::string_view text) {
  if (Trim(text).empty()) throw ConfigError("cannot embed empty text");
}

}  // namespace

EmbeddingVector MockEmbeddingProvider::Embed(std::string_view text) {
  RequireText(text);
  EmbeddingVector v{std::vector<double>(kMockEmbeddingDim, 0.0), name_};
  for (const Token& t : Tokenize(text)) {
    v.values[Sha256(ToLower(t.text))[0] % kMockEmbeddingDim] += 1.0;
  }
  double norm = std::sqrt(std::inner_product(v.values.begin(), v.values.end(),
                                             v.values.begin(), 0.0));
  for (double& x : v.values) x /= norm;
  return v;
}

void EmbeddingBackend::Validate() const {
  if (name.empty()) throw ConfigError("embedding provider name is empty");
  if (kind == "http") {
    if (endpoint.empty()) {
      throw ConfigError("embedding provider " + name + " needs an endpoint");
    }
    if (!(rate_limit > 0)) {
      throw ConfigError("embedding provider " + name +
                        ": rate_limit must be > 0");
    }
    if (max_retries < 0) {
      throw ConfigError("embedding provider " + name + ": max_retries < 0");
    }
  } else if (kind != "mock") {
    throw ConfigError("embedding provider " + name + ": unknown kind '" + kind +
                      "'");
  }
}

EmbeddingBackend EmbeddingBackend::FromJson(const json& j) {
  EmbeddingBackend b;
  try {
    b.name = j.value("name", b.name);
    b.kind = j.value("kind", b.kind);
    b.endpoint = j.value("endpoint", b.endpoint);
    b.model_id = j.value("model_id", b.model_id);
    b.request_timeout_s = j.value("request_timeout", b.request_timeout_s);
    b.max_retries = j.value("max_retries", b.max_retries);
    b.rate_limit = j.value("rate_limit", b.rate_limit);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("embedding provider: ") + e.what());
  }
  if (j.contains("api_key")) {
    throw ConfigError("embedding provider " + b.name +
                      ": API keys are read from the environment, not config");
  }
  b.Validate();
  return b;
}

ordered_json EmbeddingBackend::ToJson() const {
  ordered_json j;
  j["name"] = name;
  j["kind"] = kind;
  j["endpoint"] = endpoint;
  j["model_id"] = model_id;
  j["request_timeout"] = request_timeout_s;
  j["max_retries"] = max_retries;
  j["rate_limit"] = rate_limit;
  return j;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(
    EmbeddingBackend backend, std::shared_ptr<HttpTransport> transport,
    std::shared_ptr<Clock> clock)
    : backend_(std::move(backend)),
      transport_(std::move(transport)),
      clock_(std::move(clock)),
      limiter_(backend_.rate_limit, clock_),
      api_key_(ApiKeyFor(backend_.name)) {}

std::vector<double> HttpEmbeddingProvider::ParseResponseBody(
    const std::string& body) {
  std::vector<double> values;
  try {
    json j = json::parse(body);
    const json& vec = j.contains("data") ? j.at("data").at(0).at("embedding")
                                         : j.at("embeddings").at(0);
    values = vec.get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ProtocolError(200, body.substr(0, 200),
                        std::string("malformed embedding response: ") + e.what());
  }
  if (values.empty() ||
      !std::all_of(values.begin(), values.end(),
                   [](double x) { return std::isfinite(x); })) {
    throw ProtocolError(200, body.substr(0, 200),
                        "embedding response has an empty or non-finite vector");
  }
  return values;
}

EmbeddingVector HttpEmbeddingProvider::Embed(std::string_view text) {
  RequireText(text);
  ordered_json req;
  req["model"] = backend_.model_id;
  req["input"] = ordered_json::array({std::string(text)});
  std::map<std::string, std::string> headers;
  if (!api_key_.empty()) headers["Authorization"] = "Bearer " + api_key_;
  RetryPolicy policy;
  policy.max_retries = backend_.max_retries;
  RetryOutcome outcome =
      PostWithRetry(*transport_, *clock_, &limiter_, policy, backend_.endpoint,
                    headers, req.dump(), Seconds(backend_.request_timeout_s));
  return EmbeddingVector{ParseResponseBody(outcome.response.body),
                         backend_.name};
}

CachedEmbeddingProvider::CachedEmbeddingProvider(
    std::unique_ptr<EmbeddingProvider> inner, std::filesystem::path path)
    : inner_(std::move(inner)), path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  for (const auto& line : SplitLines(ReadFile(path_))) {
    if (Trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      if (j.at("provider").get<std::string>() != inner_->name()) continue;
      entries_[j.at("text_sha256").get<std::string>()] =
          j.at("values").get<std::vector<double>>();
    } catch (const json::exception&) {
      continue;  // torn trailing line
    }
  }
}

EmbeddingVector CachedEmbeddingProvider::Embed(std::string_view text) {
  const std::string key = Sha256Hex(text);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return EmbeddingVector{it->second, name()};
  }
  EmbeddingVector v = inner_->Embed(text);
  ordered_json row;
  row["provider"] = name();
  row["text_sha256"] = key;
  row["values"] = v.values;
  std::lock_guard<std::mutex> lock(mu_);
  if (path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot append to cache " + path_.string());
  out << row.dump() << '\n';
  entries_[key] = v.values;
  return v;
}

std::unique_ptr<EmbeddingProvider> MakeEmbeddingProvider(
    const EmbeddingBackend& backend,
    std::optional<std::filesystem::path> cache_dir,
    std::shared_ptr<HttpTransport> transport, std::shared_ptr<Clock> clock) {
  backend.Validate();
  if (backend.kind == "mock") {
    return std::make_unique<MockEmbeddingProvider>(backend.name);
  }
  if (!transport) transport = std::make_shared<HttplibTransport>();
  if (!clock) clock = SystemClock::Instance();
  std::unique_ptr<EmbeddingProvider> p =
      std::make_unique<HttpEmbeddingProvider>(backend, transport, clock);
  if (cache_dir) {
    p = std::make_unique<CachedEmbeddingProvider>(
        std::move(p), *cache_dir / ("embed-" + backend.name + ".jsonl"));
  }
  return p;
}

double Cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.provider != b.provider) {
    throw ConfigError("cosine across providers " + a.provider + " and " +
                      b.provider);
  }
  if (a.dim() != b.dim() || a.dim() == 0) {
    throw ConfigError("cosine dimension mismatch: " + std::to_string(a.dim()) +
                      " vs " + std::to_string(b.dim()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw DegenerateInputError("cosine of a zero-norm vector");
  }
  // sqrt(na * nb) rather than sqrt(na) * sqrt(nb): for a == b this is
  // exactly na, so a vector scores exactly 1.0 against itself.
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

std::vector<ScoredCandidate> FilterCandidates(
    std::string_view seed_text, const std::vector<std::string>& candidates,
    double tau, EmbeddingProvider& provider) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw ConfigError("tau must lie in [0, 1], got " + std::to_string(tau));
  }
  const EmbeddingVector z = provider.Embed(seed_text);
  std::vector<ScoredCandidate> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    ScoredCandidate c;
    c.text = candidates[i];
    c.index = i;
    try {
      c.score = Cosine(z, provider.Embed(candidates[i]));
    } catch (const ConfigError& e) {
      throw ConfigError("candidate " + std::to_string(i) + ": " + e.what());
    } catch (const DegenerateInputError& e) {
      throw DegenerateInputError("candidate " + std::to_string(i) + ": " +
                                 e.what());
    }
    c.accepted = c.score >= tau;
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoredCandidate& a, const ScoredCandidate& b) {
                     return a.score > b.score;
                   });
  for (std::size_t r = 0; r < out.size(); ++r) out[r].rank = r + 1;
  return out;
}

}  // namespace mstemp
