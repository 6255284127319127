/*
 * Copyright 2026 The IBBE-SGX Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Thin RAII wrappers over the OpenSSL primitives used across the project.

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>

#include "ibbesgx/bytes.hpp"

namespace ibbesgx::crypto {

inline constexpr std::size_t kAeadKeySize = 32;
inline constexpr std::size_t kAeadIvSize = 12;
inline constexpr std::size_t kAeadTagSize = 16;
inline constexpr std::size_t kCtrIvSize = 16;

using Digest256 = std::array<std::uint8_t, 32>;
using Digest224 = std::array<std::uint8_t, 28>;
using Digest512 = std::array<std::uint8_t, 64>;
using Iv = std::array<std::uint8_t, kAeadIvSize>;
using Tag = std::array<std::uint8_t, kAeadTagSize>;

// Randomness source. A seeded instance is a deterministic SHA-256 counter
// DRBG so that benchmark counters and fixtures are reproducible; an unseeded
// instance draws from the operating system.
class Rng {
 public:
  using result_type = std::uint64_t;

  static Rng seeded(std::uint64_t seed);
  static Rng system();

  void fill(std::span<std::uint8_t> out);
  Bytes bytes(std::size_t n);
  Key32 key32();
  Iv iv();
  std::uint64_t next_u64();
  // Uniform in [0, bound).
  std::uint64_t uniform(std::uint64_t bound);
  bool is_seeded() const { return seeded_; }

  // UniformRandomBitGenerator, so std::shuffle and friends accept an Rng.
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return next_u64(); }

 private:
  Rng(bool seeded, std::uint64_t seed) : seeded_(seeded), seed_(seed) {}
  void refill();

  bool seeded_;
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::array<std::uint8_t, 32> block_{};
  std::size_t used_ = 32;
};

Digest224 sha224(ByteView data);
Digest256 sha256(ByteView data);
Digest512 sha512(ByteView data);
Digest256 hmac_sha256(ByteView key, ByteView data);

// Constant-time equality for equal-length buffers.
bool equal_ct(ByteView a, ByteView b);

struct AeadCiphertext {
  Bytes ciphertext;
  Tag tag{};
};

// AES-256-GCM.
AeadCiphertext aead_encrypt(const Key32& key, const Iv& iv, ByteView plaintext,
                            ByteView aad = {});
std::optional<Bytes> aead_decrypt(const Key32& key, const Iv& iv,
                                  ByteView ciphertext, const Tag& tag,
                                  ByteView aad = {});

// AES-256-CTR. Applying it twice with the same key and iv is the identity.
Bytes aes_ctr(const Key32& key, std::span<const std::uint8_t, kCtrIvSize> iv,
              ByteView data);

// Ed25519.
class SigningKey {
 public:
  static constexpr std::size_t kSignatureSize = 64;

  static SigningKey from_seed(const Key32& seed);
  static SigningKey generate(Rng& rng) { return from_seed(rng.key32()); }

  const Key32& public_key() const { return public_key_; }
  const Key32& seed() const { return seed_; }
  Bytes sign(ByteView message) const;

 private:
  SigningKey() = default;
  Key32 seed_{};
  Key32 public_key_{};
};

bool verify_signature(const Key32& public_key, ByteView message,
                      ByteView signature);

// X25519.
struct X25519KeyPair {
  Key32 private_key{};
  Key32 public_key{};

  static X25519KeyPair from_private(const Key32& private_key);
  static X25519KeyPair generate(Rng& rng) { return from_private(rng.key32()); }
};

Key32 x25519(const Key32& private_key, const Key32& peer_public);

}  // namespace ibbesgx::crypto
