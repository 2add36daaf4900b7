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

#include "mstemp/hashing.h"

#include <openssl/evp.h>

#include <cstdio>
#include <limits>
#include <memory>
#include <stdexcept>

namespace mstemp {
namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

class Sha256Builder {
 public:
  Sha256Builder() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("SHA-256 initialization failed");
    }
  }

  void Update(const void* data, std::size_t size) {
    EVP_DigestUpdate(ctx_.get(), data, size);
  }

  Digest Finish() {
    Digest out{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), out.data(), &len);
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx_;
};

void PutU64(Sha256Builder& b, std::uint64_t v) {
  std::uint8_t bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<std::uint8_t>(v >> (8 * i));
  b.Update(bytes, sizeof(bytes));
}

std::string ToHex(const Digest& d, std::size_t hex_chars) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (std::uint8_t byte : d) {
    out.push_back(kHex[byte >> 4]);
    out.push_back(kHex[byte & 0xf]);
  }
  if (hex_chars < out.size()) out.resize(hex_chars);
  return out;
}

}  // namespace

Digest Sha256(std::string_view data) {
  Sha256Builder b;
  b.Update(data.data(), data.size());
  return b.Finish();
}

std::string Sha256Hex(std::string_view data) { return ToHex(Sha256(data), 64); }

Digest HashFields(std::initializer_list<std::string_view> fields) {
  Sha256Builder b;
  for (std::string_view f : fields) {
    PutU64(b, f.size());
    b.Update(f.data(), f.size());
  }
  return b.Finish();
}

std::string HashFieldsHex(std::initializer_list<std::string_view> fields,
                          std::size_t hex_chars) {
  return ToHex(HashFields(fields), hex_chars);
}

std::uint64_t DeriveSeed(std::uint64_t master,
                         std::initializer_list<std::string_view> keys) {
  Sha256Builder b;
  PutU64(b, master);
  for (std::string_view k : keys) {
    PutU64(b, k.size());
    b.Update(k.data(), k.size());
  }
  Digest d = b.Finish();
  std::uint64_t seed = 0;
  for (int i = 0; i < 8; ++i) seed |= static_cast<std::uint64_t>(d[i]) << (8 * i);
  return seed;
}

std::string SeedToHex(std::uint64_t seed) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(seed));
  return buf;
}

std::size_t Rng::Uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::Uniform: empty range");
  const std::uint64_t range = n;
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      (std::numeric_limits<std::uint64_t>::max() % range + 1) % range;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x > limit);
  return static_cast<std::size_t>(x % range);
}

}  // namespace mstemp
