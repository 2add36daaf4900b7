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

#include "test_util.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace mstemp::testing {

std::filesystem::path TestDataDir() { return MSTEMP_TEST_DATA_DIR; }

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  const auto base = std::filesystem::temp_directory_path();
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = base / ("mstemp-test-" + std::to_string(::getpid()) +
                             "-" + std::to_string(counter++));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("could not create a temp directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::size_t OsaDistance(std::string_view a, std::string_view b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<std::size_t>> d(n + 1,
                                          std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
      }
    }
  }
  return d[n][m];
}

std::size_t Gen::Below(std::size_t n) {
  return static_cast<std::size_t>(engine_() % n);
}

bool Gen::Chance(double p) {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p;
}

std::string Gen::Word(std::size_t min_len, std::size_t max_len) {
  const std::size_t len = min_len + Below(max_len - min_len + 1);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) {
    w.push_back(static_cast<char>('a' + Below(26)));
  }
  return w;
}

std::string Gen::Sentence() {
  static const std::vector<std::string> kPronouns = {
      "I", "me", "you", "he", "him", "she", "her", "we", "us", "they",
      "them", "it", "myself", "everyone"};
  static const std::vector<std::string> kNames = {
      "Alice", "Bob", "Maria", "Peter", "Jerry", "Zoë", "Chen", "Amara"};
  static const std::vector<std::string> kWords = {
      "movie", "story", "brings", "joy", "today", "immense", "really",
      "the", "a", "an", "of", "in", "was", "is", "not", "film", "great",
      "terrible", "happy", "sad", "quickly", "and", "but", "café", "naïve"};
  static const std::vector<std::string> kClitics = {"n't", "'s", "'m", "'re"};
  static const std::vector<std::string> kPunct = {",", ";", ":", "!", "?",
                                                  "\"", "(", ")", "-", "..."};
  static const std::vector<std::string> kSpaces = {" ", " ", " ", "  ", "\t"};

  const std::size_t length = 1 + Below(14);
  std::string out;
  for (std::size_t i = 0; i < length; ++i) {
    std::string piece;
    switch (Below(8)) {
      case 0: piece = Pick(kPronouns); break;
      case 1: piece = Pick(kNames); break;
      case 2: piece = Word(1, 9); break;
      case 3: piece = std::to_string(Below(1000)); break;
      case 4: piece = Pick(kPunct); break;
      default: piece = Pick(kWords); break;
    }
    if (!out.empty() && !Chance(0.1)) out += Pick(kSpaces);
    out += piece;
    if (Chance(0.08)) out += Pick(kClitics);
  }
  if (Chance(0.7)) out += Chance(0.5) ? "." : "!";
  if (Chance(0.05)) out = " " + out;
  return out;
}

nlohmann::json MockRunConfig(const std::filesystem::path& seeds,
                             const std::filesystem::path& output_dir,
                             std::uint64_t master_seed) {
  using nlohmann::json;
  return json{
      {"master_seed", master_seed},
      {"dataset", {{"path", seeds.string()}, {"format", "tsv"}}},
      {"evaluators",
       json::array({
           {{"name", "para-a"}, {"kind", "mock"}, {"mock_seed", 1}},
           {{"name", "para-b"}, {"kind", "mock"}, {"mock_seed", 2}},
       })},
      {"evaluated",
       json::array({
           {{"name", "oracle"}, {"kind", "mock"}, {"mock_mode", "oracle"}},
       })},
      {"workers", 4},
      {"output_dir", output_dir.string()},
  };
}

std::string Slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace mstemp::testing
