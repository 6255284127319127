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

#include "ibbesgx/enclave.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <fstream>

#include "json.hpp"

#include "ibbesgx/error.hpp"

namespace ibbesgx::enclave {

namespace {

constexpr std::string_view kStateMagic = "GSTATE1";
constexpr std::string_view kDocMagic = "ACLD1";

ByteView measurement_aad(const Measurement& m) { return {m.data(), m.size()}; }

Key32 to_key(ByteView b) {
  if (b.size() != 32) fail(ErrorCode::kParse, "expected a 32-byte key");
  Key32 k;
  std::copy(b.begin(), b.end(), k.begin());
  return k;
}

Key32 read_key_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open sealing key file " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() != 32) fail(ErrorCode::kParse, "sealing key file must hold 32 bytes");
  Key32 k = to_key(data);
  secure_zero(data);
  return k;
}

}  // namespace

Measurement measure(std::string_view version) {
  ByteWriter w;
  w.raw("ibbesgx-measurement").lp(version);
  return crypto::sha256(w.bytes());
}

// SealedBlob

Bytes SealedBlob::serialize() const {
  ByteWriter w;
  w.raw(kMagic).raw(nonce).u32(static_cast<std::uint32_t>(ciphertext.size()));
  w.raw(ciphertext).raw(tag);
  return std::move(w).take();
}

SealedBlob SealedBlob::deserialize(ByteView b) {
  ByteReader r(b);
  r.expect(kMagic);
  SealedBlob s;
  const ByteView n = r.raw(crypto::kAeadIvSize);
  std::copy(n.begin(), n.end(), s.nonce.begin());
  const std::uint32_t len = r.u32();
  const ByteView ct = r.raw(len);
  s.ciphertext.assign(ct.begin(), ct.end());
  const ByteView t = r.raw(crypto::kAeadTagSize);
  std::copy(t.begin(), t.end(), s.tag.begin());
  r.expect_done();
  return s;
}

// Construction

Enclave::Enclave(const algebra::PairingCtx& ctx, std::size_t max_partition_size,
                 crypto::Rng rng, std::string version)
    : ctx_(ctx),
      version_(std::move(version)),
      measurement_(measure(version_)),
      rng_(std::move(rng)),
      signer_(crypto::SigningKey::from_seed(Key32{})) {
  if (max_partition_size == 0)
    fail(ErrorCode::kInvalidArgument, "partition size must be >= 1");
  auto keys = ibbe::setup(ctx_, max_partition_size, rng_);
  master_ = std::move(keys.master);
  pk_ = std::move(keys.pub);
  sealing_key_ = rng_.key32();
  service_key_ = rng_.key32();
  signer_ = crypto::SigningKey::generate(rng_);
}

Enclave::Enclave(RestoreTag, const algebra::PairingCtx& ctx, crypto::Rng rng,
                 std::string version, const Key32& sealing_key)
    : ctx_(ctx),
      version_(std::move(version)),
      measurement_(measure(version_)),
      rng_(std::move(rng)),
      sealing_key_(sealing_key),
      signer_(crypto::SigningKey::from_seed(Key32{})) {}

std::unique_ptr<Enclave> Enclave::restore(const algebra::PairingCtx& ctx,
                                          const std::filesystem::path& key_file,
                                          const SealedBlob& state, crypto::Rng rng,
                                          std::string version) {
  std::unique_ptr<Enclave> e(
      new Enclave(RestoreTag{}, ctx, std::move(rng), std::move(version), read_key_file(key_file)));
  Bytes plain = e->unseal(state);
  ByteReader r(plain);
  r.expect(kStateMagic);
  e->master_ = ibbe::MasterKey::deserialize(r.lp());
  e->pk_ = ibbe::PublicKey::deserialize(r.lp());
  e->signer_ = crypto::SigningKey::from_seed(to_key(r.raw(32)));
  e->service_key_ = to_key(r.raw(32));
  const std::uint32_t users = r.u32();
  for (std::uint32_t i = 0; i < users; ++i) {
    std::string id = r.lp_string();
    e->asky_keys_.emplace(std::move(id), to_key(r.raw(32)));
  }
  const std::uint32_t groups = r.u32();
  for (std::uint32_t i = 0; i < groups; ++i) {
    Acl& acl = e->acls_[r.lp_string()];
    for (auto* set : {&acl.readers, &acl.writers}) {
      const std::uint32_t n = r.u32();
      for (std::uint32_t j = 0; j < n; ++j) set->insert(r.lp_string());
    }
  }
  r.expect_done();
  secure_zero(plain);
  return e;
}

// Sealing

SealedBlob Enclave::seal(ByteView payload) {
  SealedBlob s;
  s.nonce = fresh_iv();
  auto ct = crypto::aead_encrypt(sealing_key_, s.nonce, payload, measurement_aad(measurement_));
  s.ciphertext = std::move(ct.ciphertext);
  s.tag = ct.tag;
  return s;
}

Bytes Enclave::unseal(const SealedBlob& blob) const {
  auto pt = crypto::aead_decrypt(sealing_key_, blob.nonce, blob.ciphertext, blob.tag,
                                 measurement_aad(measurement_));
  if (!pt) fail(ErrorCode::kIntegrity, "sealed blob failed authentication");
  return std::move(*pt);
}

void Enclave::write_sealing_key_file(const std::filesystem::path& path) const {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
  if (fd < 0) fail(ErrorCode::kIo, "cannot create sealing key file " + path.string());
  const bool ok = ::fchmod(fd, 0600) == 0 &&
                  ::write(fd, sealing_key_.data(), sealing_key_.size()) ==
                      static_cast<ssize_t>(sealing_key_.size());
  ::close(fd);
  if (!ok) fail(ErrorCode::kIo, "cannot write sealing key file " + path.string());
}

SealedBlob Enclave::seal_state() {
  ByteWriter w;
  {
    std::shared_lock lock(state_mu_);
    w.raw(kStateMagic);
    Bytes mk = master_.serialize();
    w.lp(mk);
    secure_zero(mk);
    w.lp(pk_.serialize());
    w.raw(signer_.seed()).raw(service_key_);
    w.u32(static_cast<std::uint32_t>(asky_keys_.size()));
    for (const auto& [id, key] : asky_keys_) w.lp(id).raw(key);
    w.u32(static_cast<std::uint32_t>(acls_.size()));
    for (const auto& [gid, acl] : acls_) {
      w.lp(gid);
      for (const auto* set : {&acl.readers, &acl.writers}) {
        w.u32(static_cast<std::uint32_t>(set->size()));
        for (const auto& id : *set) w.lp(id);
      }
    }
  }
  Bytes plain = std::move(w).take();
  SealedBlob s = seal(plain);
  secure_zero(plain);
  return s;
}

// Randomness

Key32 Enclave::fresh_key() {
  std::lock_guard lock(rng_mu_);
  return rng_.key32();
}

crypto::Iv Enclave::fresh_iv() {
  std::lock_guard lock(rng_mu_);
  return rng_.iv();
}

algebra::Scalar Enclave::fresh_scalar() {
  std::lock_guard lock(rng_mu_);
  return algebra::Scalar::random(rng_);
}

// IBBE-SGX

ibbe::UserKey Enclave::extract_user_key(std::string_view user_id) const {
  return ibbe::extract_user_key(master_, user_id);
}

PartitionEnvelope Enclave::envelope(const ibbe::Encapsulation& enc, const Key32& gk) {
  PartitionEnvelope p;
  p.cipher = enc.cipher;
  p.iv = fresh_iv();
  Key32 k = enc.key.symmetric_key();
  auto ct = crypto::aead_encrypt(k, p.iv, gk);
  secure_zero(k);
  p.y = std::move(ct.ciphertext);
  p.y.insert(p.y.end(), ct.tag.begin(), ct.tag.end());
  return p;
}

Key32 Enclave::unseal_key(const SealedBlob& blob) const {
  Bytes b = unseal(blob);
  if (b.size() != 32) fail(ErrorCode::kIntegrity, "sealed group key has wrong length");
  Key32 k = to_key(b);
  secure_zero(b);
  return k;
}

GroupEnvelopes Enclave::create_group(std::span<const std::vector<std::string>> partitions,
                                     const std::optional<SealedBlob>& keep_gk) {
  if (partitions.empty()) fail(ErrorCode::kInvalidArgument, "group needs at least one partition");
  Key32 gk = keep_gk ? unseal_key(*keep_gk) : fresh_key();
  GroupEnvelopes out;
  out.partitions.reserve(partitions.size());
  for (const auto& members : partitions)
    out.partitions.push_back(envelope(ibbe::encrypt_master(master_, pk_, members, fresh_scalar()), gk));
  out.sealed_gk = keep_gk ? *keep_gk : seal(gk);
  secure_zero(gk);
  return out;
}

ibbe::BroadcastCipher Enclave::add_user_to_partition(const ibbe::BroadcastCipher& c,
                                                     std::string_view user_id) {
  return ibbe::add_user_to_cipher(master_, c, user_id);
}

PartitionEnvelope Enclave::new_partition(const SealedBlob& sealed_gk,
                                         std::span<const std::string> members) {
  Key32 gk = unseal_key(sealed_gk);
  PartitionEnvelope p = envelope(ibbe::encrypt_master(master_, pk_, members, fresh_scalar()), gk);
  secure_zero(gk);
  return p;
}

Enclave::RemoveResult Enclave::remove_user(std::span<const ibbe::BroadcastCipher> ciphers,
                                           std::optional<std::size_t> affected,
                                           std::string_view user_id) {
  if (affected && *affected >= ciphers.size())
    fail(ErrorCode::kInvalidArgument, "affected partition out of range");
  Key32 gk = fresh_key();
  RemoveResult out;
  out.partitions.reserve(ciphers.size());
  for (std::size_t i = 0; i < ciphers.size(); ++i) {
    const algebra::Scalar k = fresh_scalar();
    const ibbe::Encapsulation enc =
        affected && *affected == i
            ? ibbe::remove_user_from_cipher(master_, pk_, ciphers[i], user_id, k)
            : ibbe::rekey_cipher(pk_, ciphers[i], k);
    out.partitions.push_back(envelope(enc, gk));
  }
  out.sealed_gk = seal(gk);
  secure_zero(gk);
  return out;
}

// A-Sky

Key32 Enclave::asky_create_user(const std::string& user_id) {
  if (user_id.empty()) fail(ErrorCode::kInvalidArgument, "empty user id");
  Key32 key = fresh_key();
  std::unique_lock lock(state_mu_);
  if (!asky_keys_.emplace(user_id, key).second)
    fail(ErrorCode::kDuplicate, "user already exists: " + user_id);
  return key;
}

bool Enclave::asky_has_user(std::string_view user_id) const {
  std::shared_lock lock(state_mu_);
  return asky_keys_.contains(user_id);
}

void Enclave::asky_set_membership(const std::string& group_id, const std::string& user_id,
                                  Role role, Action action) {
  if (group_id.empty()) fail(ErrorCode::kInvalidArgument, "empty group id");
  std::unique_lock lock(state_mu_);
  if (!asky_keys_.contains(user_id)) fail(ErrorCode::kNotFound, "unknown user: " + user_id);
  Acl& acl = acls_[group_id];
  auto& set = role == Role::kReader ? acl.readers : acl.writers;
  if (action == Action::kAdd)
    set.insert(user_id);
  else
    set.erase(user_id);
}

Acl Enclave::asky_acl(std::string_view group_id) const {
  std::shared_lock lock(state_mu_);
  const auto it = acls_.find(group_id);
  return it == acls_.end() ? Acl{} : it->second;
}

std::vector<std::string> Enclave::asky_groups() const {
  std::shared_lock lock(state_mu_);
  std::vector<std::string> out;
  for (const auto& [gid, _] : acls_) out.push_back(gid);
  return out;
}

std::vector<std::string> Enclave::asky_users() const {
  std::shared_lock lock(state_mu_);
  std::vector<std::string> out;
  for (const auto& [uid, _] : asky_keys_) out.push_back(uid);
  return out;
}

bool Enclave::is_writer(std::string_view writer_id, std::string_view group_id) const {
  std::shared_lock lock(state_mu_);
  const auto it = acls_.find(group_id);
  return it != acls_.end() && it->second.writers.contains(std::string(writer_id));
}

std::vector<Key32> Enclave::reader_keys(std::string_view group_id) const {
  std::shared_lock lock(state_mu_);
  std::vector<Key32> keys;
  const auto it = acls_.find(group_id);
  if (it == acls_.end()) return keys;
  for (const auto& r : it->second.readers) keys.push_back(asky_keys_.find(r)->second);
  return keys;
}

asky::Envelope Enclave::asky_key_enveloping(std::string_view writer_id,
                                            std::string_view group_id, const Key32& fk) {
  asky::Envelope env;
  if (!is_writer(writer_id, group_id)) return env;
  std::vector<Key32> keys = reader_keys(group_id);
  std::lock_guard lock(rng_mu_);
  std::shuffle(keys.begin(), keys.end(), rng_);
  for (const auto& k : keys) env.fragments.push_back(asky::seal_fragment(k, fk, rng_));
  for (auto& k : keys) secure_zero(k);
  return env;
}

asky::Envelope Enclave::asky_key_enveloping_indexed(std::string_view writer_id,
                                                    std::string_view group_id,
                                                    const Key32& fk) {
  asky::Envelope env;
  env.variant = asky::EnvelopeVariant::kIndexed;
  if (!is_writer(writer_id, group_id)) return env;
  std::vector<Key32> keys = reader_keys(group_id);
  std::lock_guard lock(rng_mu_);
  rng_.fill(env.nonce);
  for (const auto& k : keys) {
    asky::Fragment f = asky::seal_fragment(k, fk, rng_);
    f.label = asky::make_label(k, env.nonce);
    env.fragments.push_back(f);
  }
  for (auto& k : keys) secure_zero(k);
  std::sort(env.fragments.begin(), env.fragments.end(),
            [](const auto& a, const auto& b) { return a.label < b.label; });
  return env;
}

Bytes Enclave::asky_sign_if_writer(std::string_view writer_id, std::string_view group_id,
                                   ByteView package) const {
  if (!is_writer(writer_id, group_id))
    fail(ErrorCode::kPermission, "not a writer of group " + std::string(group_id));
  return signer_.sign(crypto::sha256(package));
}

Key32 Enclave::derived_key(std::string_view label) const {
  return crypto::hmac_sha256(service_key_, as_bytes(label));
}

std::string Enclave::asky_issue_write_token(std::string_view writer_id,
                                            std::string_view group_id,
                                            std::string_view object_id,
                                            std::uint64_t expiry) const {
  if (!is_writer(writer_id, group_id))
    fail(ErrorCode::kPermission, "not a writer of group " + std::string(group_id));
  if (object_id.find('|') != std::string_view::npos)
    fail(ErrorCode::kInvalidArgument, "object id must not contain '|'");
  ByteWriter w;
  w.lp(object_id).u64(expiry);
  const Key32 mac_key = derived_key("write-token");
  return std::string(object_id) + "|" + std::to_string(expiry) + "|" +
         hex(crypto::hmac_sha256(mac_key, w.bytes()));
}

bool Enclave::asky_verify_write_token(std::string_view token, std::string_view object_id,
                                      std::uint64_t now) const {
  const auto a = token.find('|');
  const auto b = token.rfind('|');
  if (a == std::string_view::npos || a == b) return false;
  if (token.substr(0, a) != object_id) return false;
  const std::string_view exp_s = token.substr(a + 1, b - a - 1);
  std::uint64_t expiry = 0;
  const auto [ptr, ec] = std::from_chars(exp_s.data(), exp_s.data() + exp_s.size(), expiry);
  if (ec != std::errc{} || ptr != exp_s.data() + exp_s.size()) return false;
  if (now > expiry) return false;
  Bytes mac;
  try {
    mac = from_hex(token.substr(b + 1));
  } catch (const Error&) {
    return false;
  }
  ByteWriter w;
  w.lp(object_id).u64(expiry);
  const auto want = crypto::hmac_sha256(derived_key("write-token"), w.bytes());
  return mac.size() == want.size() && crypto::equal_ct(mac, want);
}

// ACL documents: "ACLD1" || kind || iv || lp(ct) || tag || hmac over all of it.

std::string Enclave::asky_document_id(DocumentKind kind, std::string_view id) const {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(kind)).lp(id);
  const auto h = crypto::hmac_sha256(derived_key("doc-id"), w.bytes());
  return std::string(kind == DocumentKind::kUser ? "acl/users/" : "acl/groups/") + hex(h);
}

Bytes Enclave::asky_document(DocumentKind kind, std::string_view id) const {
  nlohmann::json j;
  {
    std::shared_lock lock(state_mu_);
    j["id"] = id;
    if (kind == DocumentKind::kUser) {
      if (!asky_keys_.contains(id)) fail(ErrorCode::kNotFound, "unknown user: " + std::string(id));
      // Denormalized: the groups this user belongs to.
      auto& reads = j["reads"] = nlohmann::json::array();
      auto& writes = j["writes"] = nlohmann::json::array();
      for (const auto& [gid, acl] : acls_) {
        if (acl.readers.contains(std::string(id))) reads.push_back(gid);
        if (acl.writers.contains(std::string(id))) writes.push_back(gid);
      }
    } else {
      const auto it = acls_.find(id);
      const Acl acl = it == acls_.end() ? Acl{} : it->second;
      j["readers"] = acl.readers;
      j["writers"] = acl.writers;
    }
  }
  const std::string plain = j.dump();
  crypto::Iv iv;
  {
    std::lock_guard lock(rng_mu_);
    iv = rng_.iv();
  }
  const auto ct = crypto::aead_encrypt(derived_key("doc-enc"), iv, as_bytes(plain));
  ByteWriter w;
  w.raw(kDocMagic).u8(static_cast<std::uint8_t>(kind)).raw(iv).lp(ct.ciphertext).raw(ct.tag);
  const auto mac = crypto::hmac_sha256(derived_key("doc-mac"), w.bytes());
  w.raw(mac);
  return std::move(w).take();
}

void Enclave::asky_import_document(ByteView doc) {
  if (doc.size() < 32) fail(ErrorCode::kParse, "document too short");
  const ByteView body = doc.first(doc.size() - 32);
  const auto want = crypto::hmac_sha256(derived_key("doc-mac"), body);
  if (!crypto::equal_ct(doc.last(32), want))
    fail(ErrorCode::kIntegrity, "document MAC mismatch");
  ByteReader r(body);
  r.expect(kDocMagic);
  const std::uint8_t kind = r.u8();
  crypto::Iv iv;
  const ByteView ivb = r.raw(iv.size());
  std::copy(ivb.begin(), ivb.end(), iv.begin());
  const ByteView ct = r.lp();
  crypto::Tag tag;
  const ByteView tb = r.raw(tag.size());
  std::copy(tb.begin(), tb.end(), tag.begin());
  r.expect_done();
  const auto plain = crypto::aead_decrypt(derived_key("doc-enc"), iv, ct, tag);
  if (!plain) fail(ErrorCode::kIntegrity, "document decryption failed");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(plain->begin(), plain->end());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("document body: ") + e.what());
  }
  std::unique_lock lock(state_mu_);
  const std::string id = j.at("id").get<std::string>();
  if (kind == static_cast<std::uint8_t>(DocumentKind::kGroup)) {
    Acl acl;
    acl.readers = j.at("readers").get<std::set<std::string>>();
    acl.writers = j.at("writers").get<std::set<std::string>>();
    for (const auto* set : {&acl.readers, &acl.writers})
      for (const auto& u : *set)
        if (!asky_keys_.contains(u)) fail(ErrorCode::kNotFound, "unknown user: " + u);
    acls_[id] = std::move(acl);
  } else if (kind == static_cast<std::uint8_t>(DocumentKind::kUser)) {
    if (!asky_keys_.contains(id)) fail(ErrorCode::kNotFound, "unknown user: " + id);
    for (auto& [gid, acl] : acls_) {
      acl.readers.erase(id);
      acl.writers.erase(id);
    }
    for (const auto& g : j.at("reads")) acls_[g.get<std::string>()].readers.insert(id);
    for (const auto& g : j.at("writes")) acls_[g.get<std::string>()].writers.insert(id);
  } else {
    fail(ErrorCode::kParse, "unknown document kind");
  }
}

}  // namespace ibbesgx::enclave
