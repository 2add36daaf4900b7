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

// Content hashing and keyed seed derivation. Every random stream in the
// pipeline is derived from the run's master seed through DeriveSeed, so no
// stage depends on global RNG state or on the order in which work runs.

#ifndef MSTEMP_HASHING_H_
#define MSTEMP_HASHING_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <string_view>

namespace mstemp {

using Digest = std::array<std::uint8_t, 32>;

Digest Sha256(std::string_view data);
std::string Sha256Hex(std::string_view data);

// Hash of a sequence of fields. Each field is length-prefixed, so
// ("ab","c") and ("a","bc") hash differently.
Digest HashFields(std::initializer_list<std::string_view> fields);
std::string HashFieldsHex(std::initializer_list<std::string_view> fields,
                          std::size_t hex_chars = 64);

// Splits a child seed off `master` for the stream named by `keys`.
std::uint64_t DeriveSeed(std::uint64_t master,
                         std::initializer_list<std::string_view> keys);

std::string SeedToHex(std::uint64_t seed);

// Deterministic random stream. Wraps mt19937_64, whose output sequence is
// fixed by the standard, and does its own range reduction because the
// standard distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  // Uniform in [0, n). n must be > 0.
  std::size_t Uniform(std::size_t n);

  // Uniform in [0, 1) with 53 random bits.
  double UniformReal() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mstemp

#endif  // MSTEMP_HASHING_H_
