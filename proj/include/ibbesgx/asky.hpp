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

// Anonymous access control for shared objects.
//
// Writers draw a fresh file key fk, ask the enclave to envelope it for the
// group's readers, encrypt the file with AES-256-CTR under fk and upload
// envelope || file through the writer shield, which signs the package.
// Readers verify the signature and then find their fragment either by trial
// decryption or, for indexed envelopes, by binary search over labels.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ibbesgx/asky_envelope.hpp"
#include "ibbesgx/enclave.hpp"
#include "ibbesgx/store.hpp"

namespace ibbesgx::asky {

using enclave::Action;
using enclave::Role;

/// Administrator front end over the enclave's key table and ACLs. Every
/// change is mirrored as encrypted, MAC'd documents in `documents`.
class AccessControl {
 public:
  AccessControl(enclave::Enclave& enclave, store::ObjectStore& documents)
      : enclave_(enclave), documents_(documents) {}

  /// The returned key is handed to the user once.
  Key32 create_user(const std::string& user_id);
  void set_membership(const std::string& group_id, const std::string& user_id, Role role,
                      Action action);
  enclave::Acl acl(std::string_view group_id) const { return enclave_.asky_acl(group_id); }

  /// Re-applies every stored document; kIntegrity on a tampered one.
  void reload();

 private:
  void persist(enclave::DocumentKind kind, std::string_view id);

  enclave::Enclave& enclave_;
  store::ObjectStore& documents_;
};

/// "ASKO1" || signature length (2B BE) || signature || package
struct StoredObject {
  static constexpr std::string_view kMagic = "ASKO1";

  Bytes signature;
  Bytes package;

  Bytes serialize() const;
  static StoredObject deserialize(ByteView b);
};

/// Package layout: envelope || CTR IV (16B) || AES-256-CTR(fk, plaintext).
struct Package {
  Envelope envelope;
  std::array<std::uint8_t, crypto::kCtrIvSize> iv{};
  Bytes ciphertext;

  Bytes serialize() const;
  static Package deserialize(ByteView b);
};

class WriterShield {
 public:
  WriterShield(enclave::Enclave& enclave, store::ObjectStore& objects)
      : enclave_(enclave), objects_(objects) {}

  enclave::Enclave& enclave() { return enclave_; }
  store::ObjectStore& objects() { return objects_; }

  /// Signs and uploads `package` if `writer_id` may write to the group.
  /// kPermission otherwise, and nothing is stored.
  void proxy_write(const std::string& object_id, std::string_view writer_id,
                   std::string_view group_id, ByteView package);
  /// Capability for a direct upload instead of proxying the bytes.
  std::string issue_write_token(std::string_view writer_id, std::string_view group_id,
                                std::string_view object_id, std::uint64_t expiry) const;
  bool verify_write_token(std::string_view token, std::string_view object_id,
                          std::uint64_t now) const;

 private:
  enclave::Enclave& enclave_;
  store::ObjectStore& objects_;
};

/// Client write: fresh fk, envelope from the enclave, encrypt, upload.
void write_to_group(WriterShield& shield, const std::string& object_id,
                    std::string_view writer_id, std::string_view group_id, ByteView plaintext,
                    crypto::Rng& rng, EnvelopeVariant variant = EnvelopeVariant::kStandard);

struct ReadStats {
  std::size_t aead_trials = 0;     // fragment decryption attempts
  std::size_t search_probes = 0;   // ordering comparisons during the label search
};

/// Verifies the signature (kIntegrity), then tries fragments in order until
/// one opens (kAccessDenied if none does).
Bytes read_file(const store::ObjectStore& objects, std::string_view object_id,
                const Key32& reader_key, const Key32& signer_public,
                ReadStats* stats = nullptr);

/// Indexed envelopes only: recomputes the reader's label and locates it by
/// binary search, then performs a single AEAD decryption.
Bytes read_file_indexed(const store::ObjectStore& objects, std::string_view object_id,
                        const Key32& reader_key, const Key32& signer_public,
                        ReadStats* stats = nullptr);

/// Index of the last fragment whose label is <= `target`, using
/// ceil(log2(n)) ordering comparisons. nullopt for an empty envelope.
std::optional<std::size_t> search_label(const Envelope& env, const Label& target,
                                        std::size_t* probes = nullptr);

}  // namespace ibbesgx::asky
