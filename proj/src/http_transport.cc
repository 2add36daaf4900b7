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

#include "mstemp/http_transport.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <thread>

#include "httplib.h"
#include "mstemp/errors.h"

namespace mstemp {

Duration SystemClock::Now() {
  return std::chrono::duration_cast<Duration>(
      std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::SleepFor(Duration d) {
  if (d > Duration::zero()) std::this_thread::sleep_for(d);
}

std::shared_ptr<Clock> SystemClock::Instance() {
  static std::shared_ptr<Clock> clock = std::make_shared<SystemClock>();
  return clock;
}

Duration ManualClock::Now() {
  std::lock_guard<std::mutex> lock(mu_);
  return now_;
}

void ManualClock::SleepFor(Duration d) {
  std::lock_guard<std::mutex> lock(mu_);
  sleeps_.push_back(d);
  if (d > Duration::zero()) now_ += d;
}

void ManualClock::Advance(Duration d) {
  std::lock_guard<std::mutex> lock(mu_);
  now_ += d;
}

std::vector<Duration> ManualClock::sleeps() const {
  std::lock_guard<std::mutex> lock(mu_);
  return sleeps_;
}

RateLimiter::RateLimiter(double requests_per_minute,
                         std::shared_ptr<Clock> clock, double burst)
    : rate_per_ns_(requests_per_minute / 60e9),
      burst_(burst),
      tokens_(burst),
      clock_(std::move(clock)) {
  if (!(requests_per_minute > 0)) {
    throw ConfigError("rate_limit must be > 0 requests/minute");
  }
  if (!(burst >= 1.0)) throw ConfigError("rate limiter burst must be >= 1");
  last_ = clock_->Now();
}

void RateLimiter::Acquire() {
  while (true) {
    Duration wait;
    {
      std::lock_guard<std::mutex> lock(mu_);
      Duration now = clock_->Now();
      tokens_ = std::min(burst_, tokens_ + static_cast<double>((now - last_).count()) *
                                               rate_per_ns_);
      last_ = now;
      if (tokens_ >= 1.0 - 1e-9) {
        tokens_ -= 1.0;
        return;
      }
      wait = Duration(static_cast<Duration::rep>(
          std::ceil((1.0 - tokens_) / rate_per_ns_)));
    }
    clock_->SleepFor(wait);
  }
}

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl SplitUrl(const std::string& url) {
  std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw ConfigError("endpoint must be an absolute http(s) URL: " + url);
  }
  std::size_t slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

std::string Excerpt(const std::string& body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

bool Retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpResponse HttplibTransport::PostJson(
    const std::string& url, const std::map<std::string, std::string>& headers,
    const std::string& body, Duration timeout) {
  ParsedUrl parsed = SplitUrl(url);
  httplib::Client client(parsed.origin);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(parsed.path, h, body, "application/json");
  if (!res) {
    throw TransportError("POST " + url + " failed: " +
                         httplib::to_string(res.error()));
  }
  return HttpResponse{res->status, res->body};
}

RetryOutcome PostWithRetry(HttpTransport& transport, Clock& clock,
                           RateLimiter* limiter, const RetryPolicy& policy,
                           const std::string& url,
                           const std::map<std::string, std::string>& headers,
                           const std::string& body, Duration timeout) {
  if (policy.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  Duration backoff = policy.initial_backoff;
  std::string last_error;
  std::optional<HttpResponse> last_response;
  for (int attempt = 0;; ++attempt) {
    if (limiter) limiter->Acquire();
    try {
      HttpResponse res = transport.PostJson(url, headers, body, timeout);
      if (res.status >= 200 && res.status < 300) {
        return RetryOutcome{std::move(res), attempt};
      }
      if (!Retryable(res.status)) {
        throw ProtocolError(res.status, Excerpt(res.body),
                            "POST " + url + " returned HTTP " +
                                std::to_string(res.status) + ": " +
                                Excerpt(res.body));
      }
      last_response = std::move(res);
      last_error.clear();
    } catch (const ProtocolError&) {
      throw;
    } catch (const TransportError& e) {
      last_response.reset();
      last_error = e.what();
    }
    if (attempt >= policy.max_retries) break;
    clock.SleepFor(backoff);
    backoff = std::min(backoff * 2, policy.max_backoff);
  }
  const std::string tries = std::to_string(policy.max_retries);
  if (last_response) {
    throw ProtocolError(last_response->status, Excerpt(last_response->body),
                        "POST " + url + " returned HTTP " +
                            std::to_string(last_response->status) + " after " +
                            tries + " retries: " + Excerpt(last_response->body));
  }
  throw TransportError("POST " + url + " failed after " + tries +
                       " retries: " + last_error);
}

std::string ApiKeyFor(const std::string& backend_name) {
  std::string var = "MSTEMP_API_KEY_";
  for (char c : backend_name) {
    var.push_back(std::isalnum(static_cast<unsigned char>(c))
                      ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                      : '_');
  }
  if (const char* v = std::getenv(var.c_str()); v && *v) return v;
  if (const char* v = std::getenv("MSTEMP_API_KEY"); v && *v) return v;
  return {};
}

}  // namespace mstemp
