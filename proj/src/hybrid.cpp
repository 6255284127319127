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

#include "ibbesgx/hybrid.hpp"

#include <algorithm>

#include "ibbesgx/error.hpp"
#include "ibbesgx/op_counts.hpp"

namespace ibbesgx::hybrid {

namespace {

Key32 wrapping_key(const Key32& shared, const Key32& eph_pub, const Key32& recipient_pub) {
  ByteWriter w;
  w.raw("ibbesgx-he-wrap").raw(shared).raw(eph_pub).raw(recipient_pub);
  return crypto::sha256(w.bytes());
}

}  // namespace

std::size_t HEGroupMeta::metadata_bytes() const {
  std::size_t total = kHeaderSize;
  for (const auto& [id, _] : entries) total += 4 + id.size() + HEEntry::kSize;
  return total;
}

Bytes HEGroupMeta::serialize() const {
  ByteWriter w;
  w.raw(kMagic).u32(static_cast<std::uint32_t>(entries.size()));
  for (const auto& [id, e] : entries)
    w.lp(id).raw(e.ephemeral_public).raw(e.iv).raw(e.wrapped).raw(e.tag);
  return std::move(w).take();
}

HEGroupMeta HEGroupMeta::deserialize(ByteView b, std::string group_id) {
  ByteReader r(b);
  r.expect(kMagic);
  HEGroupMeta meta;
  meta.group_id = std::move(group_id);
  const std::uint32_t count = r.u32();
  auto copy = [&r](auto& dst) {
    const ByteView s = r.raw(dst.size());
    std::copy(s.begin(), s.end(), dst.begin());
  };
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string id = r.lp_string();
    HEEntry e;
    copy(e.ephemeral_public);
    copy(e.iv);
    copy(e.wrapped);
    copy(e.tag);
    if (!meta.entries.emplace(std::move(id), e).second)
      fail(ErrorCode::kParse, "duplicate member in HE metadata");
  }
  r.expect_done();
  return meta;
}

HEEntry he_wrap(std::string_view user_id, const Key32& recipient_public, const Key32& gk,
                crypto::Rng& rng) {
  const auto eph = crypto::X25519KeyPair::generate(rng);
  Key32 shared = crypto::x25519(eph.private_key, recipient_public);
  Key32 kek = wrapping_key(shared, eph.public_key, recipient_public);
  HEEntry e;
  e.ephemeral_public = eph.public_key;
  e.iv = rng.iv();
  const auto ct = crypto::aead_encrypt(kek, e.iv, gk, as_bytes(user_id));
  std::copy(ct.ciphertext.begin(), ct.ciphertext.end(), e.wrapped.begin());
  e.tag = ct.tag;
  secure_zero(shared);
  secure_zero(kek);
  ++counters::local().he_wrap;
  return e;
}

HEGroupMeta he_create_group(std::string group_id,
                            std::span<const std::pair<std::string, Key32>> members,
                            const Key32& gk, crypto::Rng& rng) {
  HEGroupMeta meta;
  meta.group_id = std::move(group_id);
  for (const auto& [id, pub] : members) {
    if (meta.entries.contains(id)) fail(ErrorCode::kDuplicate, "duplicate member: " + id);
    meta.entries.emplace(id, he_wrap(id, pub, gk, rng));
  }
  return meta;
}

void he_add_user(HEGroupMeta& meta, const std::string& user_id, const Key32& public_key,
                 const Key32& gk, crypto::Rng& rng) {
  if (meta.entries.contains(user_id))
    fail(ErrorCode::kAlreadyMember, "already a member: " + user_id);
  meta.entries.emplace(user_id, he_wrap(user_id, public_key, gk, rng));
}

void he_remove_user(HEGroupMeta& meta, std::string_view user_id, const Directory& directory,
                    const Key32& gk_new, crypto::Rng& rng) {
  const auto it = meta.entries.find(user_id);
  if (it == meta.entries.end())
    fail(ErrorCode::kNotMember, "not a member: " + std::string(user_id));
  meta.entries.erase(it);
  for (auto& [id, entry] : meta.entries) {
    const auto pub = directory.find(id);
    if (pub == directory.end()) fail(ErrorCode::kNotFound, "no public key for " + id);
    entry = he_wrap(id, pub->second, gk_new, rng);
  }
}

Key32 he_unwrap(const HEGroupMeta& meta, std::string_view user_id, const Key32& private_key) {
  const auto it = meta.entries.find(user_id);
  if (it == meta.entries.end())
    fail(ErrorCode::kNotMember, "not a member: " + std::string(user_id));
  ++counters::local().he_unwrap;
  const HEEntry& e = it->second;
  const auto mine = crypto::X25519KeyPair::from_private(private_key);
  Key32 shared = crypto::x25519(private_key, e.ephemeral_public);
  Key32 kek = wrapping_key(shared, e.ephemeral_public, mine.public_key);
  auto pt = crypto::aead_decrypt(kek, e.iv, e.wrapped, e.tag, as_bytes(user_id));
  secure_zero(shared);
  secure_zero(kek);
  if (!pt) fail(ErrorCode::kAuthentication, "HE entry did not open");
  Key32 gk;
  std::copy(pt->begin(), pt->end(), gk.begin());
  secure_zero(*pt);
  return gk;
}

}  // namespace ibbesgx::hybrid
