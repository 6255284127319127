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

#include "ibbesgx/crypto.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "ibbesgx/op_counts.hpp"

namespace ibbesgx::crypto {
namespace {

TEST(Rng, SeededIsDeterministic) {
  auto a = Rng::seeded(42);
  auto b = Rng::seeded(42);
  auto c = Rng::seeded(43);
  const Bytes x = a.bytes(100);
  EXPECT_EQ(x, b.bytes(100));
  EXPECT_NE(x, c.bytes(100));
}

TEST(Rng, UniformStaysInRange) {
  auto rng = Rng::seeded(1);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(rng.uniform(7), 7u);
}

TEST(Hash, KnownVectors) {
  EXPECT_EQ(hex(sha256(as_bytes("abc"))),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(hex(sha224(as_bytes("abc"))),
            "23097d223405d8228642a477bda255b32aadbce4bda0b3f7e36c9da7");
  // RFC 4231 test case 2.
  EXPECT_EQ(hex(hmac_sha256(as_bytes("Jefe"),
                            as_bytes("what do ya want for nothing?"))),
            "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST(Aead, RoundTripAndTamper) {
  auto rng = Rng::seeded(7);
  const Key32 key = rng.key32();
  const Iv iv = rng.iv();
  const Bytes msg = to_bytes("group key material");
  auto sealed = aead_encrypt(key, iv, msg, as_bytes("aad"));
  ASSERT_EQ(sealed.ciphertext.size(), msg.size());

  auto opened = aead_decrypt(key, iv, sealed.ciphertext, sealed.tag, as_bytes("aad"));
  ASSERT_TRUE(opened.has_value());
  EXPECT_EQ(*opened, msg);

  EXPECT_FALSE(aead_decrypt(key, iv, sealed.ciphertext, sealed.tag, as_bytes("aaX")));
  sealed.ciphertext[0] ^= 1;
  EXPECT_FALSE(aead_decrypt(key, iv, sealed.ciphertext, sealed.tag, as_bytes("aad")));
}

TEST(Aead, EmptyPlaintext) {
  auto rng = Rng::seeded(8);
  const Key32 key = rng.key32();
  const Iv iv = rng.iv();
  auto sealed = aead_encrypt(key, iv, {});
  auto opened = aead_decrypt(key, iv, sealed.ciphertext, sealed.tag);
  ASSERT_TRUE(opened.has_value());
  EXPECT_TRUE(opened->empty());
}

TEST(Aead, CountsCalls) {
  auto rng = Rng::seeded(9);
  const Key32 key = rng.key32();
  const Iv iv = rng.iv();
  CountScope scope;
  auto sealed = aead_encrypt(key, iv, as_bytes("x"));
  (void)aead_decrypt(key, iv, sealed.ciphertext, sealed.tag);
  (void)aead_decrypt(rng.key32(), iv, sealed.ciphertext, sealed.tag);
  EXPECT_EQ(scope.delta().aead_encrypt, 1u);
  EXPECT_EQ(scope.delta().aead_decrypt, 2u);
}

TEST(Ctr, IsInvolution) {
  auto rng = Rng::seeded(10);
  const Key32 key = rng.key32();
  std::array<std::uint8_t, kCtrIvSize> iv{};
  rng.fill(iv);
  const Bytes msg = rng.bytes(1000);
  const Bytes ct = aes_ctr(key, iv, msg);
  EXPECT_NE(ct, msg);
  EXPECT_EQ(aes_ctr(key, iv, ct), msg);
}

TEST(Ed25519, SignVerifyIsDeterministic) {
  auto rng = Rng::seeded(11);
  const auto key = SigningKey::generate(rng);
  const Bytes msg = to_bytes("package");
  const Bytes sig = key.sign(msg);
  EXPECT_EQ(sig.size(), SigningKey::kSignatureSize);
  EXPECT_EQ(sig, key.sign(msg));
  EXPECT_TRUE(verify_signature(key.public_key(), msg, sig));

  Bytes tampered = msg;
  tampered[0] ^= 0x01;
  EXPECT_FALSE(verify_signature(key.public_key(), tampered, sig));
  Bytes bad_sig = sig;
  bad_sig[10] ^= 0x80;
  EXPECT_FALSE(verify_signature(key.public_key(), msg, bad_sig));
}

TEST(X25519, SharedSecretAgrees) {
  auto rng = Rng::seeded(12);
  const auto a = X25519KeyPair::generate(rng);
  const auto b = X25519KeyPair::generate(rng);
  EXPECT_EQ(x25519(a.private_key, b.public_key), x25519(b.private_key, a.public_key));
}

}  // namespace
}  // namespace ibbesgx::crypto
