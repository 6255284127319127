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

// Partitioned group key management on top of IBBE.
//
// A group is split into partitions of at most n members. Each partition
// carries one broadcast ciphertext and an AEAD envelope y of the group key
// gk under SHA-256(bk). Clients derive gk from their own partition only, so
// decryption cost depends on n, not on the group size.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ibbesgx/enclave.hpp"
#include "ibbesgx/ibbe.hpp"
#include "ibbesgx/store.hpp"

namespace ibbesgx::groups {

struct Partition {
  static constexpr std::string_view kMagic = "GPT1";
  // Fixed cryptographic payload per partition: cipher, IV and y.
  static constexpr std::size_t kEnvelopeSize = ibbe::BroadcastCipher::kWireSize +
                                               crypto::kAeadIvSize + 32 + crypto::kAeadTagSize;

  std::uint32_t id = 0;
  std::vector<std::string> members;
  ibbe::BroadcastCipher cipher;
  crypto::Iv iv{};
  Bytes y;

  // "GPT1" || id (4B BE) || count (4B BE) || [lp ids] || cipher || IV (12B)
  //        || y-len (4B BE) || y
  Bytes serialize() const;
  static Partition deserialize(ByteView b);
  bool full(std::size_t n) const { return members.size() >= n; }
};

struct GroupState {
  std::string group_id;
  std::size_t max_partition_size = 0;
  std::vector<Partition> partitions;  // ascending id
  std::map<std::string, std::uint32_t, std::less<>> user_index;
  enclave::SealedBlob sealed_gk;
  std::uint32_t next_partition_id = 0;

  std::size_t member_count() const { return user_index.size(); }
  bool contains(std::string_view user_id) const { return user_index.contains(user_id); }
  std::vector<std::string> members() const;
  std::vector<std::size_t> partition_sizes() const;
  const Partition& partition_of(std::string_view user_id) const;
  std::size_t index_of(std::uint32_t partition_id) const;

  /// Sum of serialized partition files.
  std::size_t metadata_bytes() const;
  /// The part of metadata_bytes() that is ciphertext: m * kEnvelopeSize.
  std::size_t envelope_bytes() const { return partitions.size() * Partition::kEnvelopeSize; }

  /// Throws kIntegrity if the user index and the partitions disagree.
  void check_invariants() const;
};

/// Consecutive chunks of size n; the last may be smaller.
std::vector<std::vector<std::string>> chunk(std::span<const std::string> members,
                                            std::size_t n);

GroupState create_group(enclave::Enclave& enclave, std::string group_id,
                        std::span<const std::string> members, std::size_t n);

/// Joins the lowest-id non-full partition, or opens a singleton partition.
void add_user(enclave::Enclave& enclave, GroupState& gs, const std::string& user_id);

/// Fresh group key; the affected partition drops the user (and disappears
/// if it becomes empty), every other partition is re-keyed.
void remove_user(enclave::Enclave& enclave, GroupState& gs, std::string_view user_id);

/// Occupancy bound below which a partition counts as sparse: ceil(2n/3).
std::size_t sparse_threshold(std::size_t n);
bool should_repartition(const GroupState& gs);

/// Re-chunks the current membership when at least half the partitions are
/// sparse. The group key is kept. Returns whether it happened.
bool maybe_repartition(enclave::Enclave& enclave, GroupState& gs);

/// Client side. kAuthentication if the user is not listed in the partition
/// or the envelope does not open.
Key32 derive_group_key(const ibbe::PublicKey& pk, const Partition& p,
                       std::string_view user_id, const ibbe::UserKey& uk);

// Persistence: <group>/<8-digit partition id> and <group>.sealed_gk.
std::string partition_object_id(std::string_view group_id, std::uint32_t partition_id);
std::string sealed_gk_object_id(std::string_view group_id);
void save(const GroupState& gs, store::ObjectStore& store);
GroupState load(store::ObjectStore& store, std::string_view group_id, std::size_t n);
/// Client side: fetch one partition file.
Partition load_partition(const store::ObjectStore& store, std::string_view group_id,
                         std::uint32_t partition_id);

// Administrator front end: applies operations, repartitions after removals
// and mirrors the state into an optional store.
class GroupAdmin {
 public:
  explicit GroupAdmin(enclave::Enclave& enclave, store::ObjectStore* store = nullptr)
      : enclave_(enclave), store_(store) {}

  void create(std::string group_id, std::span<const std::string> members, std::size_t n);
  void add(const std::string& user_id);
  void remove(std::string_view user_id);

  const GroupState& state() const { return *state_; }
  bool created() const { return state_.has_value(); }
  std::size_t repartitions() const { return repartitions_; }

 private:
  void persist();

  enclave::Enclave& enclave_;
  store::ObjectStore* store_;
  std::optional<GroupState> state_;
  std::size_t repartitions_ = 0;
};

}  // namespace ibbesgx::groups
