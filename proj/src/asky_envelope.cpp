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

#include "ibbesgx/asky_envelope.hpp"

#include "ibbesgx/error.hpp"

namespace ibbesgx::asky {

void Envelope::write(ByteWriter& w) const {
  w.raw(kMagic).u8(static_cast<std::uint8_t>(variant));
  const bool indexed = variant == EnvelopeVariant::kIndexed;
  if (indexed) w.raw(nonce);
  w.u32(static_cast<std::uint32_t>(fragments.size()));
  for (const auto& f : fragments) {
    if (indexed) w.raw(f.label);
    w.raw(f.iv).raw(f.key_ct).raw(f.tag);
  }
}

Bytes Envelope::serialize() const {
  ByteWriter w;
  write(w);
  return std::move(w).take();
}

Envelope Envelope::read(ByteReader& r) {
  r.expect(kMagic);
  Envelope e;
  const std::uint8_t v = r.u8();
  if (v > 1) fail(ErrorCode::kParse, "unknown envelope variant");
  e.variant = static_cast<EnvelopeVariant>(v);
  const bool indexed = e.variant == EnvelopeVariant::kIndexed;
  if (indexed) {
    const ByteView n = r.raw(kNonceSize);
    std::copy(n.begin(), n.end(), e.nonce.begin());
  }
  const std::uint32_t count = r.u32();
  if (r.remaining() / e.fragment_size() < count)
    fail(ErrorCode::kParse, "envelope truncated");
  e.fragments.resize(count);
  auto copy = [&r](auto& dst) {
    const ByteView s = r.raw(dst.size());
    std::copy(s.begin(), s.end(), dst.begin());
  };
  for (auto& f : e.fragments) {
    if (indexed) copy(f.label);
    copy(f.iv);
    copy(f.key_ct);
    copy(f.tag);
  }
  return e;
}

Envelope Envelope::deserialize(ByteView b) {
  ByteReader r(b);
  Envelope e = read(r);
  r.expect_done();
  return e;
}

Label make_label(const Key32& reader_key, const Nonce& nonce) {
  ByteWriter w;
  w.raw(reader_key).raw(nonce);
  return crypto::sha224(w.bytes());
}

Fragment seal_fragment(const Key32& reader_key, const Key32& fk, crypto::Rng& rng) {
  Fragment f;
  f.iv = rng.iv();
  const auto ct = crypto::aead_encrypt(reader_key, f.iv, fk);
  std::copy(ct.ciphertext.begin(), ct.ciphertext.end(), f.key_ct.begin());
  f.tag = ct.tag;
  return f;
}

std::optional<Key32> open_fragment(const Key32& reader_key, const Fragment& f) {
  auto pt = crypto::aead_decrypt(reader_key, f.iv, f.key_ct, f.tag);
  if (!pt || pt->size() != kKeyCtSize) return std::nullopt;
  Key32 fk;
  std::copy(pt->begin(), pt->end(), fk.begin());
  secure_zero(*pt);
  return fk;
}

}  // namespace ibbesgx::asky
