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

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>

#include <cstring>
#include <memory>

#include "ibbesgx/error.hpp"
#include "ibbesgx/op_counts.hpp"

namespace ibbesgx::crypto {
namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};
struct PkeyDeleter {
  void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* p) const { EVP_PKEY_CTX_free(p); }
};
struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;
using Pkey = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using PkeyCtx = std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter>;
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

void check(int ok, const char* what) {
  if (ok != 1) fail(ErrorCode::kCrypto, what);
}

template <std::size_t N>
std::array<std::uint8_t, N> digest(const EVP_MD* md, ByteView data) {
  std::array<std::uint8_t, N> out{};
  unsigned int len = 0;
  check(EVP_Digest(data.data(), data.size(), out.data(), &len, md, nullptr),
        "EVP_Digest");
  return out;
}

CipherCtx new_cipher_ctx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) fail(ErrorCode::kCrypto, "EVP_CIPHER_CTX_new");
  return ctx;
}

}  // namespace

Rng Rng::seeded(std::uint64_t seed) { return Rng(true, seed); }
Rng Rng::system() { return Rng(false, 0); }

void Rng::refill() {
  if (seeded_) {
    ByteWriter w;
    w.raw("ibbesgx-drbg").u64(seed_).u64(counter_++);
    block_ = sha256(w.bytes());
  } else {
    check(RAND_bytes(block_.data(), static_cast<int>(block_.size())),
          "RAND_bytes");
  }
  used_ = 0;
}

void Rng::fill(std::span<std::uint8_t> out) {
  std::size_t off = 0;
  while (off < out.size()) {
    if (used_ == block_.size()) refill();
    std::size_t n = std::min(out.size() - off, block_.size() - used_);
    std::memcpy(out.data() + off, block_.data() + used_, n);
    secure_zero(std::span(block_).subspan(used_, n));
    used_ += n;
    off += n;
  }
}

Bytes Rng::bytes(std::size_t n) {
  Bytes out(n);
  fill(out);
  return out;
}

Key32 Rng::key32() {
  Key32 k;
  fill(k);
  return k;
}

Iv Rng::iv() {
  Iv v;
  fill(v);
  return v;
}

std::uint64_t Rng::next_u64() {
  std::array<std::uint8_t, 8> b;
  fill(b);
  std::uint64_t v = 0;
  for (auto c : b) v = v << 8 | c;
  return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) fail(ErrorCode::kInvalidArgument, "uniform bound must be > 0");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = max() - max() % bound;
  for (;;) {
    std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

Digest224 sha224(ByteView data) { return digest<28>(EVP_sha224(), data); }
Digest256 sha256(ByteView data) { return digest<32>(EVP_sha256(), data); }
Digest512 sha512(ByteView data) { return digest<64>(EVP_sha512(), data); }

Digest256 hmac_sha256(ByteView key, ByteView data) {
  Digest256 out{};
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(),
           data.size(), out.data(), &len) == nullptr)
    fail(ErrorCode::kCrypto, "HMAC");
  return out;
}

bool equal_ct(ByteView a, ByteView b) {
  return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

AeadCiphertext aead_encrypt(const Key32& key, const Iv& iv, ByteView plaintext,
                            ByteView aad) {
  ++counters::local().aead_encrypt;
  auto ctx = new_cipher_ctx();
  check(EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr,
                           nullptr),
        "gcm init");
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN,
                            static_cast<int>(iv.size()), nullptr),
        "gcm ivlen");
  check(EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), iv.data()),
        "gcm key");
  int len = 0;
  if (!aad.empty())
    check(EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                            static_cast<int>(aad.size())),
          "gcm aad");
  AeadCiphertext out;
  out.ciphertext.resize(plaintext.size());
  if (!plaintext.empty())
    check(EVP_EncryptUpdate(ctx.get(), out.ciphertext.data(), &len,
                            plaintext.data(), static_cast<int>(plaintext.size())),
          "gcm update");
  check(EVP_EncryptFinal_ex(ctx.get(), out.ciphertext.data() + plaintext.size(),
                            &len),
        "gcm final");
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG,
                            static_cast<int>(out.tag.size()), out.tag.data()),
        "gcm tag");
  return out;
}

std::optional<Bytes> aead_decrypt(const Key32& key, const Iv& iv,
                                  ByteView ciphertext, const Tag& tag,
                                  ByteView aad) {
  ++counters::local().aead_decrypt;
  auto ctx = new_cipher_ctx();
  check(EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr,
                           nullptr),
        "gcm init");
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN,
                            static_cast<int>(iv.size()), nullptr),
        "gcm ivlen");
  check(EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), iv.data()),
        "gcm key");
  int len = 0;
  if (!aad.empty())
    check(EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(),
                            static_cast<int>(aad.size())),
          "gcm aad");
  Bytes out(ciphertext.size());
  if (!ciphertext.empty())
    check(EVP_DecryptUpdate(ctx.get(), out.data(), &len, ciphertext.data(),
                            static_cast<int>(ciphertext.size())),
          "gcm update");
  Tag t = tag;
  check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG,
                            static_cast<int>(t.size()), t.data()),
        "gcm set tag");
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + ciphertext.size(), &len) != 1) {
    secure_zero(out);
    return std::nullopt;
  }
  return out;
}

Bytes aes_ctr(const Key32& key, std::span<const std::uint8_t, kCtrIvSize> iv,
              ByteView data) {
  auto ctx = new_cipher_ctx();
  check(EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_ctr(), nullptr, key.data(),
                           iv.data()),
        "ctr init");
  Bytes out(data.size());
  int len = 0;
  if (!data.empty())
    check(EVP_EncryptUpdate(ctx.get(), out.data(), &len, data.data(),
                            static_cast<int>(data.size())),
          "ctr update");
  check(EVP_EncryptFinal_ex(ctx.get(), out.data() + data.size(), &len),
        "ctr final");
  return out;
}

SigningKey SigningKey::from_seed(const Key32& seed) {
  Pkey pkey(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(),
                                         seed.size()));
  if (!pkey) fail(ErrorCode::kCrypto, "ed25519 key");
  SigningKey k;
  k.seed_ = seed;
  std::size_t len = k.public_key_.size();
  check(EVP_PKEY_get_raw_public_key(pkey.get(), k.public_key_.data(), &len),
        "ed25519 public key");
  return k;
}

Bytes SigningKey::sign(ByteView message) const {
  Pkey pkey(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed_.data(),
                                         seed_.size()));
  if (!pkey) fail(ErrorCode::kCrypto, "ed25519 key");
  MdCtx md(EVP_MD_CTX_new());
  check(EVP_DigestSignInit(md.get(), nullptr, nullptr, nullptr, pkey.get()),
        "ed25519 sign init");
  Bytes sig(kSignatureSize);
  std::size_t len = sig.size();
  check(EVP_DigestSign(md.get(), sig.data(), &len, message.data(),
                       message.size()),
        "ed25519 sign");
  sig.resize(len);
  return sig;
}

bool verify_signature(const Key32& public_key, ByteView message,
                      ByteView signature) {
  Pkey pkey(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                        public_key.data(), public_key.size()));
  if (!pkey) return false;
  MdCtx md(EVP_MD_CTX_new());
  if (EVP_DigestVerifyInit(md.get(), nullptr, nullptr, nullptr, pkey.get()) != 1)
    return false;
  return EVP_DigestVerify(md.get(), signature.data(), signature.size(),
                          message.data(), message.size()) == 1;
}

X25519KeyPair X25519KeyPair::from_private(const Key32& private_key) {
  Pkey pkey(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr,
                                         private_key.data(), private_key.size()));
  if (!pkey) fail(ErrorCode::kCrypto, "x25519 key");
  X25519KeyPair kp;
  kp.private_key = private_key;
  std::size_t len = kp.public_key.size();
  check(EVP_PKEY_get_raw_public_key(pkey.get(), kp.public_key.data(), &len),
        "x25519 public key");
  return kp;
}

Key32 x25519(const Key32& private_key, const Key32& peer_public) {
  Pkey self(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr,
                                         private_key.data(), private_key.size()));
  Pkey peer(EVP_PKEY_new_raw_public_key(EVP_PKEY_X25519, nullptr,
                                        peer_public.data(), peer_public.size()));
  if (!self || !peer) fail(ErrorCode::kCrypto, "x25519 key");
  PkeyCtx ctx(EVP_PKEY_CTX_new(self.get(), nullptr));
  check(EVP_PKEY_derive_init(ctx.get()), "x25519 derive init");
  check(EVP_PKEY_derive_set_peer(ctx.get(), peer.get()), "x25519 peer");
  Key32 shared{};
  std::size_t len = shared.size();
  check(EVP_PKEY_derive(ctx.get(), shared.data(), &len), "x25519 derive");
  return shared;
}

}  // namespace ibbesgx::crypto
