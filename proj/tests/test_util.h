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

// Shared helpers for the unit and acceptance tests: scratch directories,
// fixture paths, independent oracles and hand-rolled random generators.
// Nothing here links GoogleTest, so the acceptance binary can use it too.

#ifndef MSTEMP_TESTS_TEST_UTIL_H_
#define MSTEMP_TESTS_TEST_UTIL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mstemp::testing {

std::filesystem::path TestDataDir();

// Creates a fresh directory under the system temp dir; removes it on
// destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

// Optimal string alignment distance: insert, delete, substitute and swap of
// adjacent characters each cost 1. Plain dynamic programming, written
// independently of the attack code.
std::size_t OsaDistance(std::string_view a, std::string_view b);

// Test-side random stream, deliberately separate from mstemp::Rng.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  std::size_t Below(std::size_t n);  // [0, n)
  bool Chance(double p);
  template <typename T>
  const T& Pick(const std::vector<T>& v) {
    return v[Below(v.size())];
  }

  // Lowercase ASCII word with a length in [min_len, max_len].
  std::string Word(std::size_t min_len, std::size_t max_len);

  // Sentence mixing pronouns, names, common nouns, verbs, contractions,
  // punctuation, digits and some non-ASCII words, with irregular spacing.
  std::string Sentence();

 private:
  std::mt19937_64 engine_;
};

// Minimal all-mock run config over `seeds`. Callers adjust the returned
// object before loading it with LoadRunConfigJson.
nlohmann::json MockRunConfig(const std::filesystem::path& seeds,
                             const std::filesystem::path& output_dir,
                             std::uint64_t master_seed = 42);

// Whole file contents, or "" when the file does not exist.
std::string Slurp(const std::filesystem::path& path);

}  // namespace mstemp::testing

#endif  // MSTEMP_TESTS_TEST_UTIL_H_
