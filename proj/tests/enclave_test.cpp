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

#include <gtest/gtest.h>
#include <sys/stat.h>

#include "ibbesgx/error.hpp"
#include "ibbesgx/op_counts.hpp"
#include "enclave_access.hpp"
#include "test_util.hpp"

namespace ibbesgx::enclave {
namespace {

using ibbesgx::testing::code_of;
using ibbesgx::testing::TempDir;
using TA = EnclaveTestAccess;

const algebra::PairingCtx& ctx() {
  static const algebra::PairingCtx c;
  return c;
}

std::unique_ptr<Enclave> make(std::uint64_t seed, std::size_t n = 8,
                              std::string version = std::string(kDefaultVersion)) {
  return std::make_unique<Enclave>(ctx(), n, crypto::Rng::seeded(seed), std::move(version));
}

// Client side: recover gk from a partition envelope.
std::optional<Key32> open_partition(const ibbe::PublicKey& pk, const PartitionEnvelope& p,
                                    std::span<const std::string> members,
                                    const ibbe::UserKey& uk) {
  const auto bk = ibbe::decrypt(pk, members, uk.user_id, uk, p.cipher);
  crypto::Tag tag;
  std::copy(p.y.end() - 16, p.y.end(), tag.begin());
  auto pt = crypto::aead_decrypt(bk.symmetric_key(), p.iv, ByteView(p.y).first(p.y.size() - 16),
                                 tag);
  if (!pt) return std::nullopt;
  Key32 k;
  std::copy(pt->begin(), pt->end(), k.begin());
  return k;
}

TEST(EnclaveTest, InitIsDeterministicUnderSeed) {
  auto a = make(11);
  auto b = make(11);
  EXPECT_EQ(a->attest_stub(), b->attest_stub());
  EXPECT_EQ(TA::master(*a).serialize(), TA::master(*b).serialize());
  EXPECT_EQ(a->public_key().serialize(), b->public_key().serialize());
  auto c = make(12);
  EXPECT_NE(TA::master(*a).serialize(), TA::master(*c).serialize());
  EXPECT_EQ(a->attest_stub(), c->attest_stub());
}

TEST(EnclaveTest, PublicKeyHasNPlusThreeComponents) {
  for (std::size_t n : {1u, 4u, 8u}) {
    auto e = make(n, n);
    const auto& pk = e->public_key();
    EXPECT_EQ(2 + pk.h_powers.size(), n + 3);
    EXPECT_EQ(e->max_partition_size(), n);
  }
  EXPECT_EQ(code_of([] { make(1, 0); }), ErrorCode::kInvalidArgument);
}

TEST(EnclaveTest, MeasurementDependsOnVersionOnly) {
  EXPECT_EQ(measure("v1"), measure("v1"));
  EXPECT_NE(measure("v1"), measure("v2"));
  EXPECT_EQ(measure("v1").size(), 32u);
  EXPECT_EQ(make(1, 2, "v2")->attest_stub(), measure("v2"));
}

TEST(EnclaveTest, SealRoundTripsAndDetectsTampering) {
  auto e = make(3);
  EXPECT_TRUE(e->unseal(e->seal({})).empty());
  auto rng = crypto::Rng::seeded(5);
  const Key32 gk = rng.key32();
  const SealedBlob s = e->seal(gk);
  EXPECT_EQ(e->unseal(s), Bytes(gk.begin(), gk.end()));
  EXPECT_EQ(SealedBlob::deserialize(s.serialize()), s);
  EXPECT_NE(e->seal(gk), s);  // fresh nonce

  for (std::size_t bit = 0; bit < s.ciphertext.size() * 8; bit += 7) {
    SealedBlob t = s;
    t.ciphertext[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    EXPECT_EQ(code_of([&] { e->unseal(t); }), ErrorCode::kIntegrity);
  }
  for (std::size_t i = 0; i < s.tag.size(); ++i) {
    SealedBlob t = s;
    t.tag[i] ^= 0x80;
    EXPECT_EQ(code_of([&] { e->unseal(t); }), ErrorCode::kIntegrity);
  }
  SealedBlob t = s;
  t.nonce[0] ^= 1;
  EXPECT_EQ(code_of([&] { e->unseal(t); }), ErrorCode::kIntegrity);
  // Another instance has another sealing key.
  EXPECT_EQ(code_of([&] { make(4)->unseal(s); }), ErrorCode::kIntegrity);
}

TEST(EnclaveTest, SealedBlobLayout) {
  auto e = make(3);
  const Bytes wire = e->seal(to_bytes("abc")).serialize();
  ASSERT_EQ(wire.size(), 6 + 12 + 4 + 3 + 16);
  EXPECT_EQ(to_string(ByteView(wire).first(6)), "GSEAL1");
  EXPECT_EQ(wire[18], 0);
  EXPECT_EQ(wire[21], 3);
  EXPECT_EQ(code_of([&] { SealedBlob::deserialize(ByteView(wire).first(30)); }),
            ErrorCode::kParse);
}

TEST(EnclaveTest, StateSurvivesRestore) {
  TempDir dir;
  auto e = make(21);
  const Key32 alice = e->asky_create_user("alice");
  e->asky_create_user("bob");
  e->asky_set_membership("g", "alice", Role::kReader, Action::kAdd);
  e->asky_set_membership("g", "bob", Role::kWriter, Action::kAdd);
  const std::vector<std::vector<std::string>> parts = {{"u1", "u2"}};
  const auto group = e->create_group(parts);

  const auto key_file = dir.path() / "sealing.key";
  e->write_sealing_key_file(key_file);
  struct stat st{};
  ASSERT_EQ(::stat(key_file.c_str(), &st), 0);
  EXPECT_EQ(st.st_mode & 0777, 0600u);

  const SealedBlob state = e->seal_state();
  auto r = Enclave::restore(ctx(), key_file, SealedBlob::deserialize(state.serialize()),
                            crypto::Rng::seeded(99));
  EXPECT_EQ(r->attest_stub(), e->attest_stub());
  EXPECT_EQ(r->public_key().serialize(), e->public_key().serialize());
  EXPECT_EQ(TA::master(*r).serialize(), TA::master(*e).serialize());
  EXPECT_EQ(r->signing_public_key(), e->signing_public_key());
  EXPECT_EQ(TA::asky_key(*r, "alice"), alice);
  EXPECT_EQ(r->asky_acl("g"), e->asky_acl("g"));
  EXPECT_EQ(TA::gk(*r, group.sealed_gk), TA::gk(*e, group.sealed_gk));

  EXPECT_EQ(code_of([&] {
              Enclave::restore(ctx(), key_file, state, crypto::Rng::seeded(1), "other build");
            }),
            ErrorCode::kIntegrity);
}

TEST(EnclaveTest, GroupEnvelopesOpenForMembersOnly) {
  auto e = make(31, 4);
  const std::vector<std::vector<std::string>> parts = {{"a", "b", "c"}, {"d"}};
  const auto g = e->create_group(parts);
  ASSERT_EQ(g.partitions.size(), 2u);
  const Key32 gk = TA::gk(*e, g.sealed_gk);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    EXPECT_EQ(g.partitions[i].y.size(), 48u);
    for (const auto& id : parts[i])
      EXPECT_EQ(open_partition(e->public_key(), g.partitions[i], parts[i],
                               e->extract_user_key(id)),
                gk);
  }
  ibbe::UserKey forged = e->extract_user_key("z");
  forged.user_id = "a";
  EXPECT_EQ(open_partition(e->public_key(), g.partitions[0], parts[0], forged), std::nullopt);

  // Keeping the group key re-envelopes the same gk.
  const auto again = e->create_group(parts, g.sealed_gk);
  EXPECT_EQ(TA::gk(*e, again.sealed_gk), gk);
  EXPECT_EQ(open_partition(e->public_key(), again.partitions[1], parts[1],
                           e->extract_user_key("d")),
            gk);
}

TEST(EnclaveTest, RemoveUserRotatesKeyAndRekeys) {
  auto e = make(41, 4);
  std::vector<std::vector<std::string>> parts = {{"a", "b"}, {"c", "d"}};
  const auto g = e->create_group(parts);
  const Key32 gk = TA::gk(*e, g.sealed_gk);
  const std::vector<ibbe::BroadcastCipher> ciphers = {g.partitions[0].cipher,
                                                      g.partitions[1].cipher};
  CountScope scope;
  const auto r = e->remove_user(ciphers, 0, "a");
  EXPECT_EQ(scope.delta().g2_exp, 2u + 1u);
  const Key32 gk2 = TA::gk(*e, r.sealed_gk);
  EXPECT_NE(gk, gk2);
  parts[0] = {"b"};
  EXPECT_EQ(open_partition(e->public_key(), r.partitions[0], parts[0], e->extract_user_key("b")),
            gk2);
  EXPECT_EQ(open_partition(e->public_key(), r.partitions[1], parts[1], e->extract_user_key("d")),
            gk2);
  const std::vector<std::string> with_a = {"a", "b"};
  EXPECT_EQ(open_partition(e->public_key(), r.partitions[0], with_a, e->extract_user_key("a")),
            std::nullopt);
  EXPECT_EQ(code_of([&] { e->remove_user(ciphers, 5, "a"); }), ErrorCode::kInvalidArgument);
}

TEST(EnclaveTest, NewPartitionCarriesCurrentKey) {
  auto e = make(51, 2);
  const std::vector<std::vector<std::string>> parts = {{"a", "b"}};
  const auto g = e->create_group(parts);
  const std::vector<std::string> fresh = {"c"};
  const auto p = e->new_partition(g.sealed_gk, fresh);
  EXPECT_EQ(open_partition(e->public_key(), p, fresh, e->extract_user_key("c")),
            TA::gk(*e, g.sealed_gk));
}

TEST(EnclaveTest, AskyUsersAndMembership) {
  auto e = make(61);
  const Key32 a = e->asky_create_user("alice");
  const Key32 b = e->asky_create_user("bob");
  EXPECT_NE(a, b);
  EXPECT_EQ(code_of([&] { e->asky_create_user("alice"); }), ErrorCode::kDuplicate);
  EXPECT_EQ(code_of([&] { e->asky_set_membership("g", "carol", Role::kReader, Action::kAdd); }),
            ErrorCode::kNotFound);
  e->asky_set_membership("g", "alice", Role::kReader, Action::kAdd);
  EXPECT_TRUE(e->asky_acl("g").readers.contains("alice"));
  e->asky_set_membership("g", "alice", Role::kReader, Action::kRemove);
  EXPECT_FALSE(e->asky_acl("g").readers.contains("alice"));
  EXPECT_TRUE(e->asky_has_user("bob"));
  EXPECT_FALSE(e->asky_has_user("carol"));
}

TEST(EnclaveTest, EnvelopingRespectsWriterAcl) {
  auto e = make(71);
  std::map<std::string, Key32> keys;
  for (int i = 0; i < 10; ++i) {
    const std::string id = "r" + std::to_string(i);
    keys[id] = e->asky_create_user(id);
    e->asky_set_membership("g", id, Role::kReader, Action::kAdd);
  }
  e->asky_create_user("w");
  const Key32 fk = crypto::Rng::seeded(8).key32();
  EXPECT_TRUE(e->asky_key_enveloping("w", "g", fk).empty());
  EXPECT_TRUE(e->asky_key_enveloping_indexed("w", "g", fk).empty());
  EXPECT_EQ(code_of([&] { e->asky_sign_if_writer("w", "g", to_bytes("x")); }),
            ErrorCode::kPermission);

  e->asky_set_membership("g", "w", Role::kWriter, Action::kAdd);
  const auto env = e->asky_key_enveloping("w", "g", fk);
  EXPECT_EQ(env.payload_bytes(), 600u);
  for (const auto& [id, k] : keys) {
    int opened = 0;
    for (const auto& f : env.fragments) opened += asky::open_fragment(k, f) == fk;
    EXPECT_EQ(opened, 1) << id;
  }

  const auto idx = e->asky_key_enveloping_indexed("w", "g", fk);
  EXPECT_EQ(idx.payload_bytes(), 16u + 880u);
  for (std::size_t i = 1; i < idx.fragments.size(); ++i)
    EXPECT_LT(idx.fragments[i - 1].label, idx.fragments[i].label);
  const auto idx2 = e->asky_key_enveloping_indexed("w", "g", fk);
  EXPECT_NE(idx.nonce, idx2.nonce);
  for (const auto& f : idx.fragments)
    for (const auto& f2 : idx2.fragments) EXPECT_NE(f.label, f2.label);
  for (const auto& [id, k] : keys) {
    const auto label = asky::make_label(k, idx.nonce);
    const auto it = std::find_if(idx.fragments.begin(), idx.fragments.end(),
                                 [&](const auto& f) { return f.label == label; });
    ASSERT_NE(it, idx.fragments.end());
    EXPECT_EQ(asky::open_fragment(k, *it), fk);
  }

  const Bytes pkg = to_bytes("package");
  const Bytes sig = e->asky_sign_if_writer("w", "g", pkg);
  EXPECT_TRUE(crypto::verify_signature(e->signing_public_key(), crypto::sha256(pkg), sig));
}

TEST(EnclaveTest, WriteTokens) {
  auto e = make(81);
  e->asky_create_user("w");
  EXPECT_EQ(code_of([&] { e->asky_issue_write_token("w", "g", "obj", 100); }),
            ErrorCode::kPermission);
  e->asky_set_membership("g", "w", Role::kWriter, Action::kAdd);
  const std::string t = e->asky_issue_write_token("w", "g", "obj", 100);
  EXPECT_TRUE(e->asky_verify_write_token(t, "obj", 100));
  EXPECT_FALSE(e->asky_verify_write_token(t, "obj", 101));
  EXPECT_FALSE(e->asky_verify_write_token(t, "other", 50));
  std::string forged = t;
  forged.back() = forged.back() == '0' ? '1' : '0';
  EXPECT_FALSE(e->asky_verify_write_token(forged, "obj", 50));
  EXPECT_FALSE(e->asky_verify_write_token("obj|999|00", "obj", 50));
  EXPECT_FALSE(make(82)->asky_verify_write_token(t, "obj", 50));
}

TEST(EnclaveTest, AclDocumentsHideIdsAndCarryMacs) {
  auto e = make(91);
  e->asky_create_user("alice-the-reader");
  e->asky_set_membership("secret-group", "alice-the-reader", Role::kReader, Action::kAdd);
  const Bytes gdoc = e->asky_document(DocumentKind::kGroup, "secret-group");
  const Bytes udoc = e->asky_document(DocumentKind::kUser, "alice-the-reader");
  for (const auto& d : {gdoc, udoc}) {
    EXPECT_FALSE(contains(d, as_bytes("alice-the-reader")));
    EXPECT_FALSE(contains(d, as_bytes("secret-group")));
  }
  const std::string gid = e->asky_document_id(DocumentKind::kGroup, "secret-group");
  EXPECT_EQ(gid.find("secret-group"), std::string::npos);
  EXPECT_EQ(gid, e->asky_document_id(DocumentKind::kGroup, "secret-group"));
  EXPECT_NE(gid, e->asky_document_id(DocumentKind::kUser, "secret-group"));

  e->asky_set_membership("secret-group", "alice-the-reader", Role::kReader, Action::kRemove);
  e->asky_import_document(gdoc);
  EXPECT_TRUE(e->asky_acl("secret-group").readers.contains("alice-the-reader"));
  e->asky_set_membership("secret-group", "alice-the-reader", Role::kReader, Action::kRemove);
  e->asky_import_document(udoc);
  EXPECT_TRUE(e->asky_acl("secret-group").readers.contains("alice-the-reader"));

  for (std::size_t i = 0; i < gdoc.size(); i += 5) {
    Bytes t = gdoc;
    t[i] ^= 0x01;
    const ErrorCode c = code_of([&] { e->asky_import_document(t); });
    EXPECT_EQ(c, ErrorCode::kIntegrity) << i;
  }
  EXPECT_EQ(code_of([&] { make(92)->asky_import_document(gdoc); }), ErrorCode::kIntegrity);
}

TEST(EnclaveTest, NoSecretAppearsInAnyOutput) {
  auto e = make(101, 4);
  std::vector<Bytes> outputs;
  e->asky_create_user("r");
  e->asky_create_user("w");
  e->asky_set_membership("g", "r", Role::kReader, Action::kAdd);
  e->asky_set_membership("g", "w", Role::kWriter, Action::kAdd);
  const Key32 fk = crypto::Rng::seeded(1).key32();
  outputs.push_back(e->public_key().serialize());
  outputs.push_back(e->seal_state().serialize());
  outputs.push_back(e->asky_key_enveloping("w", "g", fk).serialize());
  outputs.push_back(e->asky_key_enveloping_indexed("w", "g", fk).serialize());
  outputs.push_back(e->asky_sign_if_writer("w", "g", to_bytes("pkg")));
  outputs.push_back(to_bytes(e->asky_issue_write_token("w", "g", "o", 9)));
  outputs.push_back(e->asky_document(DocumentKind::kGroup, "g"));
  outputs.push_back(e->asky_document(DocumentKind::kUser, "r"));
  outputs.push_back(e->extract_user_key("u1").serialize());
  const std::vector<std::vector<std::string>> parts = {{"u1", "u2"}, {"u3"}};
  const auto g = e->create_group(parts);
  outputs.push_back(g.sealed_gk.serialize());
  std::vector<ibbe::BroadcastCipher> ciphers;
  for (const auto& p : g.partitions) {
    outputs.push_back(p.cipher.serialize());
    outputs.push_back(p.y);
    ciphers.push_back(p.cipher);
  }
  const auto r = e->remove_user(ciphers, 0, "u1");
  outputs.push_back(r.sealed_gk.serialize());
  for (const auto& p : r.partitions) outputs.push_back(p.y);

  const auto& mk = TA::master(*e);
  const std::vector<Bytes> secrets = {
      Bytes(mk.gamma.to_bytes().begin(), mk.gamma.to_bytes().end()),
      [&] { auto b = mk.g.to_bytes(); return Bytes(b.begin(), b.end()); }(),
      Bytes(TA::sealing_key(*e).begin(), TA::sealing_key(*e).end()),
      Bytes(TA::service_key(*e).begin(), TA::service_key(*e).end()),
      Bytes(TA::signing_seed(*e).begin(), TA::signing_seed(*e).end()),
      [&] { auto k = TA::asky_key(*e, "r"); return Bytes(k.begin(), k.end()); }(),
      [&] { auto k = TA::asky_key(*e, "w"); return Bytes(k.begin(), k.end()); }(),
      Bytes(fk.begin(), fk.end()),
      [&] { auto k = TA::gk(*e, g.sealed_gk); return Bytes(k.begin(), k.end()); }(),
      [&] { auto k = TA::gk(*e, r.sealed_gk); return Bytes(k.begin(), k.end()); }(),
  };
  for (std::size_t s = 0; s < secrets.size(); ++s)
    for (std::size_t o = 0; o < outputs.size(); ++o) {
      EXPECT_FALSE(contains(outputs[o], secrets[s])) << "secret " << s << " in output " << o;
      EXPECT_EQ(hex(outputs[o]).find(hex(secrets[s])), std::string::npos);
    }
}

}  // namespace
}  // namespace ibbesgx::enclave
