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

#include <gtest/gtest.h>

#include <cmath>

#include "enclave_access.hpp"
#include "ibbesgx/op_counts.hpp"
#include "test_util.hpp"

namespace ibbesgx::asky {
namespace {

using enclave::Enclave;
using enclave::EnclaveTestAccess;
using ibbesgx::testing::code_of;

const algebra::PairingCtx& ctx() {
  static const algebra::PairingCtx c;
  return c;
}

class AskyTest : public ::testing::Test {
 protected:
  AskyTest()
      : enclave_(ctx(), 2, crypto::Rng::seeded(555)),
        acl_(enclave_, docs_),
        shield_(enclave_, objects_) {}

  // Creates `n` readers of `group` and one writer "w".
  std::vector<std::pair<std::string, Key32>> populate(std::size_t n,
                                                      const std::string& group = "g") {
    std::vector<std::pair<std::string, Key32>> readers;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string id = group + "-r" + std::to_string(i);
      readers.emplace_back(id, acl_.create_user(id));
      acl_.set_membership(group, id, Role::kReader, Action::kAdd);
    }
    if (!enclave_.asky_has_user("w")) writer_key_ = acl_.create_user("w");
    acl_.set_membership(group, "w", Role::kWriter, Action::kAdd);
    return readers;
  }
  const Key32& signer() const { return enclave_.signing_public_key(); }

  Enclave enclave_;
  store::MemoryStore docs_;
  store::MemoryStore objects_;
  AccessControl acl_;
  WriterShield shield_;
  Key32 writer_key_{};
  crypto::Rng rng_ = crypto::Rng::seeded(9);
};

TEST(EnvelopeFormatTest, FragmentSizes) {
  EXPECT_EQ(kStandardFragmentSize, 60u);
  EXPECT_EQ(kIndexedFragmentSize, 88u);
  Envelope e;
  e.variant = EnvelopeVariant::kIndexed;
  e.nonce[0] = 7;
  e.fragments.resize(3);
  e.fragments[1].label[0] = 1;
  e.fragments[2].tag[15] = 2;
  const Bytes wire = e.serialize();
  EXPECT_EQ(wire.size(), 5 + 1 + 16 + 4 + 3 * 88);
  EXPECT_EQ(Envelope::deserialize(wire), e);
  Envelope s;
  s.fragments.resize(2);
  EXPECT_EQ(s.serialize().size(), 5 + 1 + 4 + 2 * 60);
  EXPECT_EQ(code_of([&] { Envelope::deserialize(ByteView(wire).first(wire.size() - 1)); }),
            ErrorCode::kParse);
}

TEST(SearchLabelTest, ProbeCountIsCeilLog2) {
  auto rng = crypto::Rng::seeded(3);
  for (std::size_t n : {1u, 2u, 3u, 7u, 8u, 9u, 100u, 1024u}) {
    Envelope e;
    e.variant = EnvelopeVariant::kIndexed;
    for (std::size_t i = 0; i < n; ++i) {
      Fragment f;
      rng.fill(f.label);
      e.fragments.push_back(f);
    }
    std::sort(e.fragments.begin(), e.fragments.end(),
              [](const auto& a, const auto& b) { return a.label < b.label; });
    const auto bound = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n))));
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t probes = 0;
      const auto hit = search_label(e, e.fragments[i].label, &probes);
      ASSERT_EQ(hit, i);
      EXPECT_LE(probes, bound) << n;
    }
  }
  EXPECT_EQ(search_label(Envelope{}, Label{}), std::nullopt);
}

TEST_F(AskyTest, CreateUserAndMembership) {
  const Key32 a = acl_.create_user("a");
  const Key32 b = acl_.create_user("b");
  EXPECT_NE(a, b);
  EXPECT_EQ(code_of([&] { acl_.create_user("a"); }), ErrorCode::kDuplicate);
  EXPECT_EQ(code_of([&] { acl_.set_membership("g", "zz", Role::kReader, Action::kAdd); }),
            ErrorCode::kNotFound);
  acl_.set_membership("g", "a", Role::kReader, Action::kAdd);
  EXPECT_TRUE(acl_.acl("g").readers.contains("a"));
}

TEST_F(AskyTest, AclDocumentsPersistAndReload) {
  populate(3);
  EXPECT_EQ(docs_.list("acl/groups/").size(), 1u);
  EXPECT_EQ(docs_.list("acl/users/").size(), 4u);
  for (const auto& id : docs_.list())
    for (const char* name : {"g-r0", "g-r1", "g-r2"}) {
      EXPECT_EQ(id.find(name), std::string::npos);
      EXPECT_FALSE(contains(docs_.get(id), as_bytes(name)));
    }
  const auto before = acl_.acl("g");
  // Drop the in-enclave ACL and rebuild it from documents.
  enclave_.asky_set_membership("g", "g-r1", Role::kReader, Action::kRemove);
  acl_.reload();
  EXPECT_EQ(acl_.acl("g"), before);

  const std::string gid = docs_.list("acl/groups/").front();
  Bytes doc = docs_.get(gid);
  doc[doc.size() / 2] ^= 1;
  docs_.put(gid, doc);
  EXPECT_EQ(code_of([&] { acl_.reload(); }), ErrorCode::kIntegrity);
}

TEST_F(AskyTest, EnvelopeByteAccounting) {
  for (std::size_t r : {1u, 10u, 37u}) {
    const std::string g = "grp" + std::to_string(r);
    populate(r, g);
    const Key32 fk = rng_.key32();
    const Envelope s = enclave_.asky_key_enveloping("w", g, fk);
    const Envelope x = enclave_.asky_key_enveloping_indexed("w", g, fk);
    EXPECT_EQ(s.payload_bytes(), 60 * r);
    EXPECT_EQ(x.payload_bytes(), 16 + 88 * r);
    EXPECT_EQ(s.serialize().size(), 5 + 1 + 4 + 60 * r);
    EXPECT_EQ(x.serialize().size(), 5 + 1 + 4 + 16 + 88 * r);
  }
}

TEST_F(AskyTest, NonWriterGetsEmptyEnvelopeAndCannotUpload) {
  populate(3);
  acl_.create_user("intruder");
  const Key32 fk = rng_.key32();
  EXPECT_TRUE(enclave_.asky_key_enveloping("intruder", "g", fk).empty());
  EXPECT_EQ(code_of([&] {
              write_to_group(shield_, "obj/1", "intruder", "g", to_bytes("x"), rng_);
            }),
            ErrorCode::kPermission);
  EXPECT_TRUE(objects_.list().empty());
}

TEST_F(AskyTest, WriteReadRoundTripForEveryReader) {
  const auto readers = populate(6);
  const Bytes text = to_bytes("quarterly numbers");
  write_to_group(shield_, "obj/std", "w", "g", text, rng_);
  write_to_group(shield_, "obj/idx", "w", "g", text, rng_, EnvelopeVariant::kIndexed);
  for (const auto& [id, key] : readers) {
    EXPECT_EQ(read_file(objects_, "obj/std", key, signer()), text) << id;
    EXPECT_EQ(read_file(objects_, "obj/idx", key, signer()), text) << id;
    EXPECT_EQ(read_file_indexed(objects_, "obj/idx", key, signer()), text) << id;
  }
  const Key32 stranger = acl_.create_user("stranger");
  EXPECT_EQ(code_of([&] { read_file(objects_, "obj/std", stranger, signer()); }),
            ErrorCode::kAccessDenied);
  EXPECT_EQ(code_of([&] { read_file_indexed(objects_, "obj/idx", stranger, signer()); }),
            ErrorCode::kAccessDenied);
  EXPECT_EQ(code_of([&] { read_file_indexed(objects_, "obj/std", readers[0].second, signer()); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { read_file(objects_, "obj/none", stranger, signer()); }),
            ErrorCode::kNotFound);
}

TEST_F(AskyTest, FreshCiphertextsAndEmptyPlaintext) {
  const auto readers = populate(2);
  write_to_group(shield_, "a", "w", "g", to_bytes("same"), rng_);
  write_to_group(shield_, "b", "w", "g", to_bytes("same"), rng_);
  EXPECT_NE(objects_.get("a"), objects_.get("b"));
  write_to_group(shield_, "e", "w", "g", {}, rng_);
  EXPECT_TRUE(read_file(objects_, "e", readers[0].second, signer()).empty());
}

TEST_F(AskyTest, WriterWithoutReadRoleCannotRead) {
  populate(2);
  write_to_group(shield_, "o", "w", "g", to_bytes("data"), rng_);
  EXPECT_EQ(code_of([&] { read_file(objects_, "o", writer_key_, signer()); }),
            ErrorCode::kAccessDenied);
  acl_.set_membership("g", "w", Role::kReader, Action::kAdd);
  write_to_group(shield_, "o2", "w", "g", to_bytes("data"), rng_);
  EXPECT_EQ(read_file(objects_, "o2", writer_key_, signer()), to_bytes("data"));
}

TEST_F(AskyTest, TamperingFailsBeforeAnyTrial) {
  const auto readers = populate(4);
  write_to_group(shield_, "o", "w", "g", to_bytes("payload"), rng_);
  const Bytes good = objects_.get("o");
  for (std::size_t i = 0; i < good.size(); ++i) {
    Bytes bad = good;
    bad[i] ^= 0x01;
    objects_.put("o", bad);
    ReadStats stats;
    EXPECT_EQ(code_of([&] { read_file(objects_, "o", readers[0].second, signer(), &stats); }),
              ErrorCode::kIntegrity)
        << i;
    EXPECT_EQ(stats.aead_trials, 0u);
  }
  objects_.put("o", good);
  const StoredObject obj = StoredObject::deserialize(good);
  EXPECT_TRUE(crypto::verify_signature(signer(), crypto::sha256(obj.package), obj.signature));
  // Another enclave's signing key does not verify.
  Enclave other(ctx(), 1, crypto::Rng::seeded(1));
  EXPECT_EQ(code_of([&] { read_file(objects_, "o", readers[0].second, other.signing_public_key()); }),
            ErrorCode::kIntegrity);
}

TEST_F(AskyTest, IndexedReadUsesOneDecryption) {
  const auto readers = populate(8);
  write_to_group(shield_, "o", "w", "g", to_bytes("hello"), rng_, EnvelopeVariant::kIndexed);
  for (const auto& [id, key] : readers) {
    ReadStats stats;
    CountScope scope;
    EXPECT_EQ(read_file_indexed(objects_, "o", key, signer(), &stats), to_bytes("hello"));
    EXPECT_EQ(scope.delta().aead_decrypt, 1u);
    EXPECT_EQ(stats.aead_trials, 1u);
    EXPECT_LE(stats.search_probes, 3u);
  }
}

TEST_F(AskyTest, StandardReadTrialsAverageHalfTheEnvelope) {
  const auto readers = populate(20);
  double total = 0;
  const int writes = 50;
  for (int i = 0; i < writes; ++i) {
    const std::string oid = "o" + std::to_string(i);
    write_to_group(shield_, oid, "w", "g", to_bytes("x"), rng_);
    for (const auto& [id, key] : readers) {
      ReadStats stats;
      read_file(objects_, oid, key, signer(), &stats);
      total += static_cast<double>(stats.aead_trials);
    }
  }
  // Each reader sits at a uniformly random position: mean (n + 1) / 2.
  const double mean = total / (writes * 20.0);
  EXPECT_NEAR(mean, 10.5, 1.0);
}

TEST_F(AskyTest, LazyRevocationTimeline) {
  const auto readers = populate(4);
  write_to_group(shield_, "before", "w", "g", to_bytes("one"), rng_);
  acl_.set_membership("g", readers[0].first, Role::kReader, Action::kRemove);
  write_to_group(shield_, "after", "w", "g", to_bytes("two"), rng_, EnvelopeVariant::kIndexed);
  EXPECT_EQ(read_file(objects_, "before", readers[0].second, signer()), to_bytes("one"));
  EXPECT_EQ(code_of([&] { read_file(objects_, "after", readers[0].second, signer()); }),
            ErrorCode::kAccessDenied);
  EXPECT_EQ(code_of([&] { read_file_indexed(objects_, "after", readers[0].second, signer()); }),
            ErrorCode::kAccessDenied);
  for (std::size_t i = 1; i < readers.size(); ++i) {
    EXPECT_EQ(read_file(objects_, "before", readers[i].second, signer()), to_bytes("one"));
    EXPECT_EQ(read_file_indexed(objects_, "after", readers[i].second, signer()), to_bytes("two"));
  }
}

TEST_F(AskyTest, EnvelopeCarriesNoIdentities) {
  const auto readers = populate(5);
  const Key32 fk = rng_.key32();
  const Envelope a = enclave_.asky_key_enveloping_indexed("w", "g", fk);
  acl_.set_membership("g", readers[4].first, Role::kReader, Action::kRemove);
  const Envelope b = enclave_.asky_key_enveloping_indexed("w", "g", fk);
  for (const auto& env : {a, b}) {
    const Bytes wire = env.serialize();
    for (const auto& [id, key] : readers) {
      EXPECT_FALSE(contains(wire, as_bytes(id)));
      EXPECT_FALSE(contains(wire, key));
    }
    EXPECT_FALSE(contains(wire, fk));
  }
  // Only the fixed header is shared; everything after it is per-reader.
  const Bytes wa = a.serialize();
  const Bytes wb = b.serialize();
  EXPECT_TRUE(std::equal(wa.begin(), wa.begin() + 6, wb.begin()));
  EXPECT_EQ(wa.size() - wb.size(), kIndexedFragmentSize);
}

TEST_F(AskyTest, WriteTokenCapability) {
  populate(1);
  const std::string t = shield_.issue_write_token("w", "g", "obj/t", 1000);
  EXPECT_TRUE(shield_.verify_write_token(t, "obj/t", 999));
  EXPECT_FALSE(shield_.verify_write_token(t, "obj/t", 1001));
  EXPECT_FALSE(shield_.verify_write_token(t, "obj/u", 10));
  acl_.create_user("x");
  EXPECT_EQ(code_of([&] { shield_.issue_write_token("x", "g", "obj/t", 1000); }),
            ErrorCode::kPermission);
}

}  // namespace
}  // namespace ibbesgx::asky
