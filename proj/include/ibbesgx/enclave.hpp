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

// Simulated trusted execution boundary.
//
// The Enclave object is the only holder of the IBBE master key, the sealing
// key, the A-Sky reader keys and ACLs, and the content-signing key. Its
// public methods play the role of ecalls: everything they return is public
// material, a ciphertext, a MAC or a signature.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ibbesgx/asky_envelope.hpp"
#include "ibbesgx/bytes.hpp"
#include "ibbesgx/crypto.hpp"
#include "ibbesgx/ibbe.hpp"

namespace ibbesgx::enclave {

inline constexpr std::string_view kDefaultVersion = "ibbesgx-enclave 1.0.0";

using Measurement = crypto::Digest256;

/// Digest identifying an enclave build.
Measurement measure(std::string_view version);

struct SealedBlob {
  static constexpr std::string_view kMagic = "GSEAL1";

  crypto::Iv nonce{};
  Bytes ciphertext;
  crypto::Tag tag{};

  // "GSEAL1" || nonce (12B) || length (4B BE) || ciphertext || tag (16B)
  Bytes serialize() const;
  static SealedBlob deserialize(ByteView b);
  friend bool operator==(const SealedBlob&, const SealedBlob&) = default;
};

/// {C_i, IV_i, y_i} where y_i = AEAD(SHA-256(bk_i), IV_i, gk) as ct || tag.
struct PartitionEnvelope {
  ibbe::BroadcastCipher cipher;
  crypto::Iv iv{};
  Bytes y;
};

struct GroupEnvelopes {
  SealedBlob sealed_gk;
  std::vector<PartitionEnvelope> partitions;
};

enum class Role { kReader, kWriter };
enum class Action { kAdd, kRemove };

struct Acl {
  std::set<std::string> readers;
  std::set<std::string> writers;
  friend bool operator==(const Acl&, const Acl&) = default;
};

enum class DocumentKind : std::uint8_t { kUser = 1, kGroup = 2 };

class Enclave {
 public:
  /// Provisions a fresh enclave: master key, public key for partitions of
  /// up to `max_partition_size` members, sealing key and signing key.
  Enclave(const algebra::PairingCtx& ctx, std::size_t max_partition_size,
          crypto::Rng rng, std::string version = std::string(kDefaultVersion));

  /// Rebuilds an enclave from a sealing-key file and a sealed state blob.
  /// Fails with kIntegrity if the blob was sealed by another key or build.
  static std::unique_ptr<Enclave> restore(
      const algebra::PairingCtx& ctx, const std::filesystem::path& key_file,
      const SealedBlob& state, crypto::Rng rng,
      std::string version = std::string(kDefaultVersion));

  Enclave(const Enclave&) = delete;
  Enclave& operator=(const Enclave&) = delete;

  std::size_t max_partition_size() const { return pk_.max_set_size(); }
  const ibbe::PublicKey& public_key() const { return pk_; }
  const Key32& signing_public_key() const { return signer_.public_key(); }
  Measurement attest_stub() const { return measurement_; }

  // Sealing.
  SealedBlob seal(ByteView payload);
  /// Throws kIntegrity on any tampering.
  Bytes unseal(const SealedBlob& blob) const;
  /// Writes the sealing key with owner-only permissions.
  void write_sealing_key_file(const std::filesystem::path& path) const;
  SealedBlob seal_state();

  // IBBE-SGX group ecalls.
  ibbe::UserKey extract_user_key(std::string_view user_id) const;
  /// One envelope per member list. A fresh group key is drawn unless
  /// `keep_gk` carries the current one.
  GroupEnvelopes create_group(std::span<const std::vector<std::string>> partitions,
                              const std::optional<SealedBlob>& keep_gk = std::nullopt);
  /// Constant-time: y_i and the group key are unchanged.
  ibbe::BroadcastCipher add_user_to_partition(const ibbe::BroadcastCipher& c,
                                              std::string_view user_id);
  /// Envelope of the current group key for a new partition.
  PartitionEnvelope new_partition(const SealedBlob& sealed_gk,
                                  std::span<const std::string> members);

  struct RemoveResult {
    SealedBlob sealed_gk;
    std::vector<PartitionEnvelope> partitions;
  };
  /// Draws a new group key, strips `user_id` from `ciphers[affected]` and
  /// re-keys every other partition. Without `affected` all are re-keyed.
  RemoveResult remove_user(std::span<const ibbe::BroadcastCipher> ciphers,
                           std::optional<std::size_t> affected, std::string_view user_id);

  // A-Sky ecalls.
  /// Returns the user's secret once; it never leaves the enclave again.
  Key32 asky_create_user(const std::string& user_id);
  bool asky_has_user(std::string_view user_id) const;
  void asky_set_membership(const std::string& group_id, const std::string& user_id,
                           Role role, Action action);
  Acl asky_acl(std::string_view group_id) const;
  std::vector<std::string> asky_groups() const;
  std::vector<std::string> asky_users() const;

  /// Empty envelope unless `writer_id` may write to the group.
  asky::Envelope asky_key_enveloping(std::string_view writer_id, std::string_view group_id,
                                     const Key32& fk);
  asky::Envelope asky_key_enveloping_indexed(std::string_view writer_id,
                                             std::string_view group_id, const Key32& fk);
  /// Ed25519 over SHA-256(package); kPermission for non-writers.
  Bytes asky_sign_if_writer(std::string_view writer_id, std::string_view group_id,
                            ByteView package) const;
  /// "object_id|expiry|hex(mac)"; kPermission for non-writers.
  std::string asky_issue_write_token(std::string_view writer_id, std::string_view group_id,
                                     std::string_view object_id, std::uint64_t expiry) const;
  bool asky_verify_write_token(std::string_view token, std::string_view object_id,
                               std::uint64_t now) const;

  // Persisted ACL documents: encrypted and HMAC'd, keyed by a hashed id.
  std::string asky_document_id(DocumentKind kind, std::string_view id) const;
  Bytes asky_document(DocumentKind kind, std::string_view id) const;
  /// Verifies and applies a document. kIntegrity on a bad MAC.
  void asky_import_document(ByteView doc);

 private:
  struct RestoreTag {};
  Enclave(RestoreTag, const algebra::PairingCtx& ctx, crypto::Rng rng, std::string version,
          const Key32& sealing_key);

  Key32 fresh_key();
  crypto::Iv fresh_iv();
  algebra::Scalar fresh_scalar();
  PartitionEnvelope envelope(const ibbe::Encapsulation& enc, const Key32& gk);
  Key32 unseal_key(const SealedBlob& blob) const;
  Key32 derived_key(std::string_view label) const;
  bool is_writer(std::string_view writer_id, std::string_view group_id) const;
  std::vector<Key32> reader_keys(std::string_view group_id) const;

  friend struct EnclaveTestAccess;

  algebra::PairingCtx ctx_;
  std::string version_;
  Measurement measurement_{};

  mutable std::mutex rng_mu_;
  mutable crypto::Rng rng_;

  Key32 sealing_key_{};
  Key32 service_key_{};
  ibbe::MasterKey master_;
  ibbe::PublicKey pk_;
  crypto::SigningKey signer_;

  mutable std::shared_mutex state_mu_;
  std::map<std::string, Key32, std::less<>> asky_keys_;
  std::map<std::string, Acl, std::less<>> acls_;
};

}  // namespace ibbesgx::enclave
