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

#include "ibbesgx/groups.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "ibbesgx/error.hpp"

namespace ibbesgx::groups {

namespace {

void apply(Partition& p, const enclave::PartitionEnvelope& env) {
  p.cipher = env.cipher;
  p.iv = env.iv;
  p.y = env.y;
}

GroupState build(enclave::Enclave& enclave, std::string group_id,
                 std::span<const std::string> members, std::size_t n,
                 const std::optional<enclave::SealedBlob>& keep_gk) {
  const auto chunks = chunk(members, n);
  auto env = enclave.create_group(chunks, keep_gk);
  GroupState gs;
  gs.group_id = std::move(group_id);
  gs.max_partition_size = n;
  gs.sealed_gk = std::move(env.sealed_gk);
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    Partition p;
    p.id = static_cast<std::uint32_t>(i);
    p.members = chunks[i];
    apply(p, env.partitions[i]);
    for (const auto& m : p.members) gs.user_index.emplace(m, p.id);
    gs.partitions.push_back(std::move(p));
  }
  gs.next_partition_id = static_cast<std::uint32_t>(chunks.size());
  return gs;
}

}  // namespace

// Partition

Bytes Partition::serialize() const {
  ByteWriter w;
  w.raw(kMagic).u32(id).u32(static_cast<std::uint32_t>(members.size()));
  for (const auto& m : members) w.lp(m);
  w.raw(cipher.serialize()).raw(iv).lp(y);
  return std::move(w).take();
}

Partition Partition::deserialize(ByteView b) {
  ByteReader r(b);
  r.expect(kMagic);
  Partition p;
  p.id = r.u32();
  const std::uint32_t count = r.u32();
  if (count > r.remaining() / 4) fail(ErrorCode::kParse, "member count exceeds file size");
  p.members.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) p.members.push_back(r.lp_string());
  p.cipher = ibbe::BroadcastCipher::deserialize(r.raw(ibbe::BroadcastCipher::kWireSize));
  const ByteView iv = r.raw(crypto::kAeadIvSize);
  std::copy(iv.begin(), iv.end(), p.iv.begin());
  const ByteView y = r.lp();
  p.y.assign(y.begin(), y.end());
  r.expect_done();
  return p;
}

// GroupState

std::vector<std::string> GroupState::members() const {
  std::vector<std::string> out;
  out.reserve(user_index.size());
  for (const auto& [id, _] : user_index) out.push_back(id);
  return out;
}

std::vector<std::size_t> GroupState::partition_sizes() const {
  std::vector<std::size_t> out;
  for (const auto& p : partitions) out.push_back(p.members.size());
  return out;
}

std::size_t GroupState::index_of(std::uint32_t partition_id) const {
  const auto it = std::lower_bound(partitions.begin(), partitions.end(), partition_id,
                                   [](const Partition& p, std::uint32_t id) { return p.id < id; });
  if (it == partitions.end() || it->id != partition_id)
    fail(ErrorCode::kNotFound, "no partition " + std::to_string(partition_id));
  return static_cast<std::size_t>(it - partitions.begin());
}

const Partition& GroupState::partition_of(std::string_view user_id) const {
  const auto it = user_index.find(user_id);
  if (it == user_index.end())
    fail(ErrorCode::kNotMember, "not a member: " + std::string(user_id));
  return partitions[index_of(it->second)];
}

std::size_t GroupState::metadata_bytes() const {
  std::size_t total = 0;
  for (const auto& p : partitions) total += p.serialize().size();
  return total;
}

void GroupState::check_invariants() const {
  std::size_t listed = 0;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    const Partition& p = partitions[i];
    if (i > 0 && partitions[i - 1].id >= p.id)
      fail(ErrorCode::kIntegrity, "partitions out of order");
    if (p.id >= next_partition_id) fail(ErrorCode::kIntegrity, "partition id not allocated");
    if (p.members.empty() || p.members.size() > max_partition_size)
      fail(ErrorCode::kIntegrity, "partition occupancy out of range");
    for (const auto& m : p.members) {
      const auto it = user_index.find(m);
      if (it == user_index.end() || it->second != p.id)
        fail(ErrorCode::kIntegrity, "user index disagrees for " + m);
    }
    listed += p.members.size();
  }
  if (listed != user_index.size()) fail(ErrorCode::kIntegrity, "user index has extra entries");
}

// Operations

std::vector<std::vector<std::string>> chunk(std::span<const std::string> members,
                                            std::size_t n) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "partition size must be >= 1");
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < members.size(); i += n)
    out.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(i),
                     members.begin() + static_cast<std::ptrdiff_t>(std::min(i + n, members.size())));
  return out;
}

GroupState create_group(enclave::Enclave& enclave, std::string group_id,
                        std::span<const std::string> members, std::size_t n) {
  if (members.empty()) fail(ErrorCode::kInvalidArgument, "group must not be empty");
  if (n == 0) fail(ErrorCode::kInvalidArgument, "partition size must be >= 1");
  if (n > enclave.max_partition_size())
    fail(ErrorCode::kCapacity, "partition size exceeds enclave public key capacity");
  std::unordered_set<std::string_view> seen;
  for (const auto& m : members)
    if (!seen.insert(m).second) fail(ErrorCode::kDuplicate, "duplicate member: " + m);
  return build(enclave, std::move(group_id), members, n, std::nullopt);
}

void add_user(enclave::Enclave& enclave, GroupState& gs, const std::string& user_id) {
  if (gs.contains(user_id)) fail(ErrorCode::kAlreadyMember, "already a member: " + user_id);
  const auto it = std::find_if(gs.partitions.begin(), gs.partitions.end(),
                               [&](const Partition& p) { return !p.full(gs.max_partition_size); });
  if (it != gs.partitions.end()) {
    it->cipher = enclave.add_user_to_partition(it->cipher, user_id);
    it->members.push_back(user_id);
    gs.user_index.emplace(user_id, it->id);
    return;
  }
  Partition p;
  p.id = gs.next_partition_id++;
  p.members = {user_id};
  apply(p, enclave.new_partition(gs.sealed_gk, p.members));
  gs.user_index.emplace(user_id, p.id);
  gs.partitions.push_back(std::move(p));
}

void remove_user(enclave::Enclave& enclave, GroupState& gs, std::string_view user_id) {
  const auto it = gs.user_index.find(user_id);
  if (it == gs.user_index.end())
    fail(ErrorCode::kNotMember, "not a member: " + std::string(user_id));
  std::size_t idx = gs.index_of(it->second);
  gs.user_index.erase(it);

  std::optional<std::size_t> affected = idx;
  Partition& p = gs.partitions[idx];
  if (p.members.size() == 1) {
    gs.partitions.erase(gs.partitions.begin() + static_cast<std::ptrdiff_t>(idx));
    affected.reset();
  }
  std::vector<ibbe::BroadcastCipher> ciphers;
  ciphers.reserve(gs.partitions.size());
  for (const auto& q : gs.partitions) ciphers.push_back(q.cipher);
  auto res = enclave.remove_user(ciphers, affected, user_id);
  for (std::size_t i = 0; i < gs.partitions.size(); ++i) apply(gs.partitions[i], res.partitions[i]);
  gs.sealed_gk = std::move(res.sealed_gk);
  if (affected) {
    auto& members = gs.partitions[*affected].members;
    members.erase(std::find(members.begin(), members.end(), user_id));
  }
}

std::size_t sparse_threshold(std::size_t n) { return (2 * n + 2) / 3; }

bool should_repartition(const GroupState& gs) {
  const std::size_t m = gs.partitions.size();
  if (m < 2) return false;
  const std::size_t bound = sparse_threshold(gs.max_partition_size);
  const auto sparse = static_cast<std::size_t>(
      std::count_if(gs.partitions.begin(), gs.partitions.end(),
                    [&](const Partition& p) { return p.members.size() <= bound; }));
  return 2 * sparse >= m;
}

bool maybe_repartition(enclave::Enclave& enclave, GroupState& gs) {
  if (!should_repartition(gs)) return false;
  std::vector<std::string> members;
  members.reserve(gs.member_count());
  for (const auto& p : gs.partitions) members.insert(members.end(), p.members.begin(), p.members.end());
  gs = build(enclave, gs.group_id, members, gs.max_partition_size, gs.sealed_gk);
  return true;
}

Key32 derive_group_key(const ibbe::PublicKey& pk, const Partition& p,
                       std::string_view user_id, const ibbe::UserKey& uk) {
  if (std::find(p.members.begin(), p.members.end(), user_id) == p.members.end())
    fail(ErrorCode::kAuthentication, "not listed in partition: " + std::string(user_id));
  if (p.y.size() != 32 + crypto::kAeadTagSize)
    fail(ErrorCode::kAuthentication, "malformed group key envelope");
  const ibbe::BroadcastKey bk = ibbe::decrypt(pk, p.members, user_id, uk, p.cipher);
  Key32 k = bk.symmetric_key();
  crypto::Tag tag;
  std::copy(p.y.end() - crypto::kAeadTagSize, p.y.end(), tag.begin());
  auto pt = crypto::aead_decrypt(k, p.iv, ByteView(p.y).first(32), tag);
  secure_zero(k);
  if (!pt) fail(ErrorCode::kAuthentication, "group key envelope did not open");
  Key32 gk;
  std::copy(pt->begin(), pt->end(), gk.begin());
  secure_zero(*pt);
  return gk;
}

// Persistence

std::string partition_object_id(std::string_view group_id, std::uint32_t partition_id) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08u", partition_id);
  return std::string(group_id) + "/" + buf;
}

std::string sealed_gk_object_id(std::string_view group_id) {
  return std::string(group_id) + ".sealed_gk";
}

void save(const GroupState& gs, store::ObjectStore& store) {
  std::unordered_set<std::string> live;
  for (const auto& p : gs.partitions) {
    std::string id = partition_object_id(gs.group_id, p.id);
    store.put(id, p.serialize());
    live.insert(std::move(id));
  }
  for (const auto& id : store.list(gs.group_id + "/"))
    if (!live.contains(id)) store.remove(id);
  store.put(sealed_gk_object_id(gs.group_id), gs.sealed_gk.serialize());
}

GroupState load(store::ObjectStore& store, std::string_view group_id, std::size_t n) {
  GroupState gs;
  gs.group_id = std::string(group_id);
  gs.max_partition_size = n;
  gs.sealed_gk = enclave::SealedBlob::deserialize(store.get(sealed_gk_object_id(group_id)));
  for (const auto& id : store.list(gs.group_id + "/")) {
    Partition p = Partition::deserialize(store.get(id));
    if (id != partition_object_id(group_id, p.id))
      fail(ErrorCode::kParse, "partition file name does not match its id: " + id);
    for (const auto& m : p.members)
      if (!gs.user_index.emplace(m, p.id).second)
        fail(ErrorCode::kParse, "member listed twice: " + m);
    gs.next_partition_id = std::max(gs.next_partition_id, p.id + 1);
    gs.partitions.push_back(std::move(p));
  }
  gs.check_invariants();
  return gs;
}

Partition load_partition(const store::ObjectStore& store, std::string_view group_id,
                         std::uint32_t partition_id) {
  return Partition::deserialize(store.get(partition_object_id(group_id, partition_id)));
}

// GroupAdmin

void GroupAdmin::create(std::string group_id, std::span<const std::string> members,
                        std::size_t n) {
  state_ = create_group(enclave_, std::move(group_id), members, n);
  persist();
}

void GroupAdmin::add(const std::string& user_id) {
  if (!state_) fail(ErrorCode::kInvalidArgument, "group not created");
  add_user(enclave_, *state_, user_id);
  persist();
}

void GroupAdmin::remove(std::string_view user_id) {
  if (!state_) fail(ErrorCode::kInvalidArgument, "group not created");
  remove_user(enclave_, *state_, user_id);
  if (maybe_repartition(enclave_, *state_)) ++repartitions_;
  persist();
}

void GroupAdmin::persist() {
  if (store_) save(*state_, *store_);
}

}  // namespace ibbesgx::groups
