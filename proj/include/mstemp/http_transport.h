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

// JSON-over-HTTP plumbing shared by the chat-completion client and the
// embedding client: a swappable transport, an injectable clock, a token
// bucket rate limiter and a retry loop with exponential backoff.

#ifndef MSTEMP_HTTP_TRANSPORT_H_
#define MSTEMP_HTTP_TRANSPORT_H_

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace mstemp {

using Duration = std::chrono::nanoseconds;

class Clock {
 public:
  virtual ~Clock() = default;
  // Time since an arbitrary, fixed epoch.
  virtual Duration Now() = 0;
  virtual void SleepFor(Duration d) = 0;
};

class SystemClock : public Clock {
 public:
  Duration Now() override;
  void SleepFor(Duration d) override;
  static std::shared_ptr<Clock> Instance();
};

// Test clock: time moves only when someone sleeps or calls Advance.
class ManualClock : public Clock {
 public:
  Duration Now() override;
  void SleepFor(Duration d) override;
  void Advance(Duration d);
  std::vector<Duration> sleeps() const;

 private:
  mutable std::mutex mu_;
  Duration now_{0};
  std::vector<Duration> sleeps_;
};

// Token bucket refilled at requests_per_minute / 60 tokens per second. With
// the default burst of 1, any 60-second window admits at most
// requests_per_minute acquisitions.
class RateLimiter {
 public:
  RateLimiter(double requests_per_minute, std::shared_ptr<Clock> clock,
              double burst = 1.0);

  // Blocks (via the clock) until a token is available.
  void Acquire();

 private:
  std::mutex mu_;
  double rate_per_ns_;
  double burst_;
  double tokens_;
  Duration last_;
  std::shared_ptr<Clock> clock_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // Throws TransportError when no HTTP response was obtained.
  virtual HttpResponse PostJson(const std::string& url,
                                const std::map<std::string, std::string>& headers,
                                const std::string& body, Duration timeout) = 0;
};

// cpp-httplib backed transport; supports http:// and https:// URLs.
class HttplibTransport : public HttpTransport {
 public:
  HttpResponse PostJson(const std::string& url,
                        const std::map<std::string, std::string>& headers,
                        const std::string& body, Duration timeout) override;
};

struct RetryPolicy {
  int max_retries = 3;
  Duration initial_backoff = std::chrono::milliseconds(500);
  Duration max_backoff = std::chrono::seconds(30);
};

struct RetryOutcome {
  HttpResponse response;
  int retries = 0;
};

// POSTs with retries on transport failures, 429 and 5xx. Other non-2xx
// statuses fail immediately with ProtocolError. Exhausted retries raise
// TransportError (no response) or ProtocolError (last status and body
// excerpt).
RetryOutcome PostWithRetry(HttpTransport& transport, Clock& clock,
                           RateLimiter* limiter, const RetryPolicy& policy,
                           const std::string& url,
                           const std::map<std::string, std::string>& headers,
                           const std::string& body, Duration timeout);

// MSTEMP_API_KEY_<NAME> (name upper-cased, non-alphanumerics as '_'),
// falling back to MSTEMP_API_KEY. Empty when neither is set.
std::string ApiKeyFor(const std::string& backend_name);

}  // namespace mstemp

#endif  // MSTEMP_HTTP_TRANSPORT_H_
