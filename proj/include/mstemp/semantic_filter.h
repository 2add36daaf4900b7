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

// Semantic-preserving filter: embed the seed and each paraphrase candidate,
// score by cosine similarity, rank, and accept when score >= tau.

#ifndef MSTEMP_SEMANTIC_FILTER_H_
#define MSTEMP_SEMANTIC_FILTER_H_

#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "mstemp/http_transport.h"

namespace mstemp {

inline constexpr double kDefaultTau = 0.85;
inline constexpr std::size_t kMockEmbeddingDim = 256;

struct EmbeddingVector {
  std::vector<double> values;
  std::string provider;

  std::size_t dim() const { return values.size(); }
  bool operator==(const EmbeddingVector&) const = default;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  // Deterministic per (provider, text). Throws ConfigError on empty text.
  virtual EmbeddingVector Embed(std::string_view text) = 0;
  virtual const std::string& name() const = 0;
};

// L2-normalized bag of tokens. Each token (as split by Tokenize, lowercased)
// adds 1 to bucket Sha256(token)[0]; word order is invisible.
class MockEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit MockEmbeddingProvider(std::string name = "mock-embed")
      : name_(std::move(name)) {}

  EmbeddingVector Embed(std::string_view text) override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
};

struct EmbeddingBackend {
  std::string name = "mock-embed";
  std::string kind = "mock";  // "mock" | "http"
  std::string endpoint;
  std::string model_id;
  double request_timeout_s = 60.0;
  int max_retries = 3;
  double rate_limit = 600.0;  // requests per minute

  void Validate() const;
  static EmbeddingBackend FromJson(const nlohmann::json& j);
  nlohmann::ordered_json ToJson() const;
};

// POSTs {"model": <model_id>, "input": [<text>]} and reads the vector from
// data[0].embedding, or from embeddings[0] for servers using that shape.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(EmbeddingBackend backend,
                        std::shared_ptr<HttpTransport> transport,
                        std::shared_ptr<Clock> clock);

  EmbeddingVector Embed(std::string_view text) override;
  const std::string& name() const override { return backend_.name; }

  // Throws ProtocolError on a malformed or non-finite vector.
  static std::vector<double> ParseResponseBody(const std::string& body);

 private:
  EmbeddingBackend backend_;
  std::shared_ptr<HttpTransport> transport_;
  std::shared_ptr<Clock> clock_;
  RateLimiter limiter_;
  std::string api_key_;
};

// Memoizes an inner provider in an append-only JSONL file:
//   {"provider", "text_sha256", "values"}
class CachedEmbeddingProvider : public EmbeddingProvider {
 public:
  CachedEmbeddingProvider(std::unique_ptr<EmbeddingProvider> inner,
                          std::filesystem::path path);

  EmbeddingVector Embed(std::string_view text) override;
  const std::string& name() const override { return inner_->name(); }

 private:
  std::unique_ptr<EmbeddingProvider> inner_;
  std::filesystem::path path_;
  std::mutex mu_;
  std::unordered_map<std::string, std::vector<double>> entries_;
};

std::unique_ptr<EmbeddingProvider> MakeEmbeddingProvider(
    const EmbeddingBackend& backend,
    std::optional<std::filesystem::path> cache_dir = std::nullopt,
    std::shared_ptr<HttpTransport> transport = nullptr,
    std::shared_ptr<Clock> clock = nullptr);

// dot(a, b) / (|a| |b|), clamped to [-1, 1]. Throws ConfigError when dims
// or providers differ and DegenerateInputError on a zero-norm vector.
double Cosine(const EmbeddingVector& a, const EmbeddingVector& b);

struct ScoredCandidate {
  std::string text;
  double score = 0.0;
  std::size_t rank = 0;        // 1-based, score non-increasing in rank
  std::size_t index = 0;       // position in the input list
  bool accepted = false;       // score >= tau

  bool operator==(const ScoredCandidate&) const = default;
};

// Scores every candidate against the seed and sorts by score descending,
// ties kept in input order. tau must lie in [0, 1].
std::vector<ScoredCandidate> FilterCandidates(
    std::string_view seed_text, const std::vector<std::string>& candidates,
    double tau, EmbeddingProvider& provider);

}  // namespace mstemp

#endif  // MSTEMP_SEMANTIC_FILTER_H_
