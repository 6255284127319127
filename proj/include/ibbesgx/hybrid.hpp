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

// Hybrid-encryption baseline: the group key is wrapped separately for every
// member with an ephemeral X25519 agreement and AES-256-GCM, so metadata and
// revocation cost grow linearly with the group.

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "ibbesgx/bytes.hpp"
#include "ibbesgx/crypto.hpp"

namespace ibbesgx::hybrid {

struct HEUserKeyPair {
  std::string user_id;
  crypto::X25519KeyPair keys;

  static HEUserKeyPair generate(std::string user_id, crypto::Rng& rng) {
    return {std::move(user_id), crypto::X25519KeyPair::generate(rng)};
  }
};

/// Public-key directory: user id -> X25519 public key.
using Directory = std::map<std::string, Key32, std::less<>>;

struct HEEntry {
  static constexpr std::size_t kSize = 32 + crypto::kAeadIvSize + 32 + crypto::kAeadTagSize;

  Key32 ephemeral_public{};
  crypto::Iv iv{};
  Key32 wrapped{};
  crypto::Tag tag{};

  friend bool operator==(const HEEntry&, const HEEntry&) = default;
};

struct HEGroupMeta {
  static constexpr std::string_view kMagic = "HEGM1";
  static constexpr std::size_t kHeaderSize = 5 + 4;

  std::string group_id;
  std::map<std::string, HEEntry, std::less<>> entries;

  std::size_t member_count() const { return entries.size(); }
  bool contains(std::string_view user_id) const { return entries.contains(user_id); }
  /// Serialized size: header plus, per member, 4 + |id| + HEEntry::kSize.
  std::size_t metadata_bytes() const;

  // "HEGM1" || count (4B BE) || repeated {lp id, entry}
  Bytes serialize() const;
  static HEGroupMeta deserialize(ByteView b, std::string group_id = {});
};

HEEntry he_wrap(std::string_view user_id, const Key32& recipient_public, const Key32& gk,
                crypto::Rng& rng);

HEGroupMeta he_create_group(std::string group_id,
                            std::span<const std::pair<std::string, Key32>> members,
                            const Key32& gk, crypto::Rng& rng);

/// One wrap. kAlreadyMember if present.
void he_add_user(HEGroupMeta& meta, const std::string& user_id, const Key32& public_key,
                 const Key32& gk, crypto::Rng& rng);

/// Drops the user and re-wraps `gk_new` for every remaining member, whose
/// public keys come from `directory`.
void he_remove_user(HEGroupMeta& meta, std::string_view user_id, const Directory& directory,
                    const Key32& gk_new, crypto::Rng& rng);

/// kNotMember without an entry, kAuthentication if the entry does not open.
Key32 he_unwrap(const HEGroupMeta& meta, std::string_view user_id, const Key32& private_key);

}  // namespace ibbesgx::hybrid
