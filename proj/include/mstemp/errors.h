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

#ifndef MSTEMP_ERRORS_H_
#define MSTEMP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace mstemp {

// Process exit codes used by the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitTransport = 3;
inline constexpr int kExitStageOrder = 4;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const { return kExitFailure; }
};

// Invalid configuration, missing lexicon categories, bad arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return kExitConfig; }
};

// Malformed input files: seed datasets, JSONL artifacts, lexicons.
class SchemaError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return kExitConfig; }
};

// Connection failures and exhausted retries.
class TransportError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return kExitTransport; }
};

// The remote answered, but not with something usable.
class ProtocolError : public TransportError {
 public:
  ProtocolError(int status, std::string body_excerpt, const std::string& what)
      : TransportError(what),
        status_(status),
        body_excerpt_(std::move(body_excerpt)) {}

  int status() const { return status_; }
  const std::string& body_excerpt() const { return body_excerpt_; }

 private:
  int status_;
  std::string body_excerpt_;
};

// A pipeline stage was invoked before the stage it depends on.
class StageOrderError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return kExitStageOrder; }
};

// Numerical inputs for which the requested quantity is undefined
// (zero-norm vectors, empty averages, oversized subsamples).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace mstemp

#endif  // MSTEMP_ERRORS_H_
