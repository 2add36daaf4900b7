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

#ifndef MSTEMP_TEXT_UTIL_H_
#define MSTEMP_TEXT_UTIL_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace mstemp {

std::string NormalizeNfc(std::string_view utf8);

std::string_view Trim(std::string_view s);

// Unicode-aware case mapping (root locale).
std::string ToLower(std::string_view utf8);
std::string ToUpper(std::string_view utf8);

// Uppercases the first code point, leaving the rest untouched.
std::string CapitalizeFirst(std::string_view utf8);

bool StartsWithUpper(std::string_view utf8);
bool IsAllUpper(std::string_view utf8);
bool IsAsciiAlpha(std::string_view s);

std::vector<std::string> SplitLines(std::string_view text);

std::string ReadFile(const std::filesystem::path& path);

// Writes through a temporary sibling and renames, so readers never observe
// a half-written artifact.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view data);

// Replaces each "{name}" in `tmpl` by the value returned from `lookup`;
// unknown names are left verbatim.
std::string RenderPlaceholders(
    std::string_view tmpl,
    const std::function<bool(std::string_view name, std::string* out)>& lookup);

// Runs fn(i) for i in [0, count) on up to `workers` threads. The first
// exception thrown by any task is rethrown after all workers have joined.
void ParallelFor(std::size_t count, std::size_t workers,
                 const std::function<void(std::size_t)>& fn);

}  // namespace mstemp

#endif  // MSTEMP_TEXT_UTIL_H_
