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

#include "ibbesgx/asky.hpp"

#include <algorithm>

#include "ibbesgx/error.hpp"

namespace ibbesgx::asky {

namespace {

Bytes open_package(const Package& pkg, const Key32& fk) {
  return crypto::aes_ctr(fk, pkg.iv, pkg.ciphertext);
}

// Signature check comes first: nothing else touches unverified bytes.
Package fetch_verified(const store::ObjectStore& objects, std::string_view object_id,
                       const Key32& signer_public) {
  StoredObject obj;
  try {
    obj = StoredObject::deserialize(objects.get(object_id));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kParse) throw;
    fail(ErrorCode::kIntegrity, "malformed stored object");
  }
  if (!crypto::verify_signature(signer_public, crypto::sha256(obj.package), obj.signature))
    fail(ErrorCode::kIntegrity, "object signature does not verify");
  return Package::deserialize(obj.package);
}

}  // namespace

// AccessControl

Key32 AccessControl::create_user(const std::string& user_id) {
  const Key32 key = enclave_.asky_create_user(user_id);
  persist(enclave::DocumentKind::kUser, user_id);
  return key;
}

void AccessControl::set_membership(const std::string& group_id, const std::string& user_id,
                                   Role role, Action action) {
  enclave_.asky_set_membership(group_id, user_id, role, action);
  persist(enclave::DocumentKind::kUser, user_id);
  persist(enclave::DocumentKind::kGroup, group_id);
}

void AccessControl::persist(enclave::DocumentKind kind, std::string_view id) {
  documents_.put(enclave_.asky_document_id(kind, id), enclave_.asky_document(kind, id));
}

void AccessControl::reload() {
  // Groups first so user documents, which are denormalized copies, win.
  for (const auto& id : documents_.list("acl/groups/"))
    enclave_.asky_import_document(documents_.get(id));
  for (const auto& id : documents_.list("acl/users/"))
    enclave_.asky_import_document(documents_.get(id));
}

// Wire formats

Bytes StoredObject::serialize() const {
  if (signature.size() > 0xffff) fail(ErrorCode::kInvalidArgument, "signature too long");
  ByteWriter w;
  w.raw(kMagic).u16(static_cast<std::uint16_t>(signature.size())).raw(signature).raw(package);
  return std::move(w).take();
}

StoredObject StoredObject::deserialize(ByteView b) {
  ByteReader r(b);
  try {
    r.expect(kMagic);
  } catch (const Error&) {
    fail(ErrorCode::kIntegrity, "not a stored object");
  }
  StoredObject o;
  const std::uint16_t n = r.u16();
  const ByteView sig = r.raw(n);
  o.signature.assign(sig.begin(), sig.end());
  const ByteView rest = r.rest();
  o.package.assign(rest.begin(), rest.end());
  return o;
}

Bytes Package::serialize() const {
  ByteWriter w;
  envelope.write(w);
  w.raw(iv).raw(ciphertext);
  return std::move(w).take();
}

Package Package::deserialize(ByteView b) {
  ByteReader r(b);
  Package p;
  p.envelope = Envelope::read(r);
  const ByteView iv = r.raw(crypto::kCtrIvSize);
  std::copy(iv.begin(), iv.end(), p.iv.begin());
  const ByteView ct = r.rest();
  p.ciphertext.assign(ct.begin(), ct.end());
  return p;
}

// WriterShield

void WriterShield::proxy_write(const std::string& object_id, std::string_view writer_id,
                               std::string_view group_id, ByteView package) {
  store::validate_id(object_id);
  StoredObject obj;
  obj.signature = enclave_.asky_sign_if_writer(writer_id, group_id, package);
  obj.package.assign(package.begin(), package.end());
  objects_.put(object_id, obj.serialize());
}

std::string WriterShield::issue_write_token(std::string_view writer_id,
                                            std::string_view group_id,
                                            std::string_view object_id,
                                            std::uint64_t expiry) const {
  return enclave_.asky_issue_write_token(writer_id, group_id, object_id, expiry);
}

bool WriterShield::verify_write_token(std::string_view token, std::string_view object_id,
                                      std::uint64_t now) const {
  return enclave_.asky_verify_write_token(token, object_id, now);
}

// Client flows

void write_to_group(WriterShield& shield, const std::string& object_id,
                    std::string_view writer_id, std::string_view group_id, ByteView plaintext,
                    crypto::Rng& rng, EnvelopeVariant variant) {
  Key32 fk = rng.key32();
  Package pkg;
  pkg.envelope = variant == EnvelopeVariant::kIndexed
                     ? shield.enclave().asky_key_enveloping_indexed(writer_id, group_id, fk)
                     : shield.enclave().asky_key_enveloping(writer_id, group_id, fk);
  rng.fill(pkg.iv);
  pkg.ciphertext = crypto::aes_ctr(fk, pkg.iv, plaintext);
  secure_zero(fk);
  shield.proxy_write(object_id, writer_id, group_id, pkg.serialize());
}

Bytes read_file(const store::ObjectStore& objects, std::string_view object_id,
                const Key32& reader_key, const Key32& signer_public, ReadStats* stats) {
  const Package pkg = fetch_verified(objects, object_id, signer_public);
  for (const auto& f : pkg.envelope.fragments) {
    if (stats) ++stats->aead_trials;
    if (auto fk = open_fragment(reader_key, f)) {
      Bytes out = open_package(pkg, *fk);
      secure_zero(*fk);
      return out;
    }
  }
  fail(ErrorCode::kAccessDenied, "no fragment opens with this key");
}

std::optional<std::size_t> search_label(const Envelope& env, const Label& target,
                                        std::size_t* probes) {
  const auto& f = env.fragments;
  if (f.empty()) return std::nullopt;
  std::size_t lo = 0;
  std::size_t len = f.size();
  while (len > 1) {
    const std::size_t half = len / 2;
    if (probes) ++*probes;
    if (f[lo + half].label <= target) lo += half;
    len -= half;
  }
  return lo;
}

Bytes read_file_indexed(const store::ObjectStore& objects, std::string_view object_id,
                        const Key32& reader_key, const Key32& signer_public,
                        ReadStats* stats) {
  const Package pkg = fetch_verified(objects, object_id, signer_public);
  const Envelope& env = pkg.envelope;
  if (env.variant != EnvelopeVariant::kIndexed)
    fail(ErrorCode::kInvalidArgument, "object was not written with an indexed envelope");
  const Label target = make_label(reader_key, env.nonce);
  const auto hit = search_label(env, target, stats ? &stats->search_probes : nullptr);
  if (!hit) fail(ErrorCode::kAccessDenied, "empty envelope");
  // The search lands on the last equal label; colliding labels sit just before it.
  for (std::size_t i = *hit + 1; i-- > 0 && env.fragments[i].label == target;) {
    if (stats) ++stats->aead_trials;
    if (auto fk = open_fragment(reader_key, env.fragments[i])) {
      Bytes out = open_package(pkg, *fk);
      secure_zero(*fk);
      return out;
    }
  }
  fail(ErrorCode::kAccessDenied, "no fragment for this key");
}

}  // namespace ibbesgx::asky
