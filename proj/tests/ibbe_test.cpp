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

#include "ibbesgx/ibbe.hpp"

#include <gtest/gtest.h>

#include "ibbesgx/error.hpp"
#include "ibbesgx/op_counts.hpp"

namespace ibbesgx::ibbe {
namespace {

using algebra::exp_g2;
using algebra::exp_gt;
using algebra::pairing;

std::vector<std::string> make_ids(std::size_t n, const std::string& prefix = "user") {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an ibbesgx::Error";
  return ErrorCode::kCrypto;
}

class IbbeTest : public ::testing::Test {
 protected:
  static constexpr std::size_t kCapacity = 128;

  static void SetUpTestSuite() {
    ctx_ = new PairingCtx();
    auto rng = crypto::Rng::seeded(99);
    keys_ = new SetupResult(setup(*ctx_, kCapacity, rng));
  }
  static void TearDownTestSuite() {
    delete keys_;
    delete ctx_;
  }

  const MasterKey& mk() const { return keys_->master; }
  const PublicKey& pk() const { return keys_->pub; }

  static PairingCtx* ctx_;
  static SetupResult* keys_;
  crypto::Rng rng = crypto::Rng::seeded(7);
};

PairingCtx* IbbeTest::ctx_ = nullptr;
SetupResult* IbbeTest::keys_ = nullptr;

TEST_F(IbbeTest, SetupShapeAndConsistency) {
  auto local = crypto::Rng::seeded(1);
  const auto one = setup(*ctx_, 1, local);
  EXPECT_EQ(one.pub.h_powers.size(), 2u);
  EXPECT_EQ(pairing(one.pub.w, one.pub.h()), pairing(one.master.g, one.pub.h_powers[1]));
  EXPECT_EQ(pk().h_powers.size(), kCapacity + 1);
  EXPECT_EQ(pairing(pk().w, pk().h()), pairing(mk().g, pk().h_powers[1]));
  EXPECT_EQ(pk().v, pairing(mk().g, pk().h()));
  EXPECT_EQ(code_of([&] { setup(*ctx_, 0, local); }), ErrorCode::kInvalidArgument);
}

TEST_F(IbbeTest, SetupCostIsLinearInCapacity) {
  std::vector<std::uint64_t> g2;
  for (std::size_t n : {100u, 200u, 400u}) {
    auto local = crypto::Rng::seeded(n);
    CountScope scope;
    setup(*ctx_, n, local);
    g2.push_back(scope.delta().g2_exp);
    // One exponentiation picks h, then one per power.
    EXPECT_EQ(scope.delta().g2_exp, n + 1);
  }
  EXPECT_EQ(g2[2] - g2[1], 2 * (g2[1] - g2[0]));
}

TEST_F(IbbeTest, ExtractIsDeterministicAndSatisfiesPairingIdentity) {
  CountScope scope;
  const UserKey a = extract_user_key(mk(), "alice");
  EXPECT_EQ(scope.delta().g1_exp, 1u);
  EXPECT_EQ(scope.delta().scalar_inv, 1u);
  EXPECT_EQ(a.sk, extract_user_key(mk(), "alice").sk);
  EXPECT_NE(a.sk, extract_user_key(mk(), "bob").sk);
  // e(sk, h^gamma) * e(sk, h)^H(u) = e(sk, h)^(gamma + H(u)) = v
  const GT lhs = pairing(a.sk, pk().h_powers[1]) *
                 exp_gt(pairing(a.sk, pk().h()), algebra::hash_to_scalar("alice"));
  EXPECT_EQ(lhs, pk().v);
}

TEST_F(IbbeTest, SingletonPublicEncryption) {
  const std::vector<std::string> s = {"u"};
  const Scalar k = Scalar::random(rng);
  const auto enc = encrypt_public(pk(), s, k);
  const G2 expected =
      exp_g2(pk().h_powers[1] * exp_g2(pk().h(), algebra::hash_to_scalar("u")), k);
  EXPECT_EQ(enc.cipher.c2, expected);
  EXPECT_EQ(enc.key.bk, exp_gt(pk().v, k));
  // With one receiver the decryption collapses to e(sk, c2).
  const UserKey uk = extract_user_key(mk(), "u");
  EXPECT_EQ(pairing(uk.sk, enc.cipher.c2), exp_gt(pk().v, k));
  EXPECT_EQ(decrypt(pk(), s, "u", uk, enc.cipher), enc.key);
}

TEST_F(IbbeTest, PublicAndMasterPathsAgree) {
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t size = 1 + rng.uniform(24);
    const auto s = make_ids(size, "t" + std::to_string(trial) + "-");
    const Scalar k = Scalar::random(rng);
    const auto pub = encrypt_public(pk(), s, k);
    const auto mas = encrypt_master(mk(), pk(), s, k);
    ASSERT_EQ(pub.cipher, mas.cipher) << "trial " << trial;
    ASSERT_EQ(pub.key, mas.key);
    ASSERT_EQ(mas.cipher.c2, exp_g2(mas.cipher.c3, k));
  }
}

TEST_F(IbbeTest, CipherSizeIsIndependentOfReceiverCount) {
  for (std::size_t n : {1u, 10u, 100u}) {
    const auto enc = encrypt_master(mk(), pk(), make_ids(n), Scalar::random(rng));
    EXPECT_EQ(enc.cipher.serialize().size(), BroadcastCipher::kWireSize);
  }
  EXPECT_EQ(BroadcastCipher::kWireSize, 245u);
}

TEST_F(IbbeTest, MasterEncryptionCostIsLinear) {
  std::uint64_t prev = 0;
  for (std::size_t n : {8u, 16u, 32u}) {
    const auto s = make_ids(n);
    CountScope scope;
    encrypt_master(mk(), pk(), s, Scalar::random(rng));
    const OpCounts d = scope.delta();
    EXPECT_EQ(d.scalar_mul, n);
    EXPECT_EQ(d.g2_exp, 2u);
    EXPECT_EQ(d.g1_exp, 1u);
    EXPECT_EQ(d.gt_exp, 1u);
    if (prev != 0) EXPECT_EQ(d.scalar_mul, 2 * prev);
    prev = d.scalar_mul;
  }
}

TEST_F(IbbeTest, EveryMemberRecoversTheBroadcastKey) {
  const auto s = make_ids(16);
  const Scalar k = Scalar::random(rng);
  const auto enc = encrypt_master(mk(), pk(), s, k);
  for (const auto& id : s)
    EXPECT_EQ(decrypt(pk(), s, id, extract_user_key(mk(), id), enc.cipher), enc.key) << id;

  // An outsider posing as a member derives garbage.
  UserKey forged = extract_user_key(mk(), "mallory");
  forged.user_id = s[3];
  EXPECT_NE(decrypt(pk(), s, s[3], forged, enc.cipher), enc.key);
  // And cannot ask as itself.
  EXPECT_EQ(code_of([&] {
              decrypt(pk(), s, "mallory", extract_user_key(mk(), "mallory"), enc.cipher);
            }),
            ErrorCode::kNotMember);
}

TEST_F(IbbeTest, InputValidation) {
  const Scalar k = Scalar::random(rng);
  EXPECT_EQ(code_of([&] { encrypt_master(mk(), pk(), make_ids(kCapacity + 1), k); }),
            ErrorCode::kCapacity);
  EXPECT_EQ(code_of([&] { encrypt_public(pk(), make_ids(kCapacity + 1), k); }),
            ErrorCode::kCapacity);
  const std::vector<std::string> dup = {"a", "b", "a"};
  EXPECT_EQ(code_of([&] { encrypt_master(mk(), pk(), dup, k); }), ErrorCode::kDuplicate);
  EXPECT_EQ(code_of([&] { encrypt_public(pk(), dup, k); }), ErrorCode::kDuplicate);
  EXPECT_EQ(code_of([&] { encrypt_master(mk(), pk(), {}, k); }),
            ErrorCode::kInvalidArgument);
  const std::vector<std::string> one = {"a"};
  EXPECT_EQ(code_of([&] { encrypt_master(mk(), pk(), one, Scalar::zero()); }),
            ErrorCode::kInvalidArgument);
}

TEST_F(IbbeTest, DegenerateIdentityIsRejected) {
  // Force gamma = -H(u) for a chosen u.
  MasterKey bad = mk();
  bad.gamma = -algebra::hash_to_scalar("victim");
  EXPECT_EQ(code_of([&] { extract_user_key(bad, "victim"); }), ErrorCode::kDegenerate);
  const std::vector<std::string> s = {"victim"};
  EXPECT_EQ(code_of([&] { encrypt_master(bad, pk(), s, Scalar::one()); }),
            ErrorCode::kDegenerate);
}

TEST_F(IbbeTest, AddUserMatchesFreshEncryption) {
  for (std::size_t n : {1u, 100u}) {
    auto s = make_ids(n);
    const Scalar k = Scalar::random(rng);
    const auto enc = encrypt_master(mk(), pk(), s, k);
    CountScope scope;
    const auto added = add_user_to_cipher(mk(), enc.cipher, "newcomer");
    EXPECT_EQ(scope.delta().g2_exp, 2u);
    EXPECT_EQ(scope.delta().cipher_exps(), 2u);
    s.push_back("newcomer");
    EXPECT_EQ(added, encrypt_master(mk(), pk(), s, k).cipher);
    if (n == 1)
      EXPECT_EQ(decrypt(pk(), s, "newcomer", extract_user_key(mk(), "newcomer"), added),
                enc.key);
  }
}

TEST_F(IbbeTest, RemoveUserMatchesFreshEncryption) {
  for (std::size_t n : {2u, 100u}) {
    const auto s = make_ids(n);
    const auto enc = encrypt_master(mk(), pk(), s, Scalar::random(rng));
    const Scalar k_new = Scalar::random(rng);
    CountScope scope;
    const auto removed = remove_user_from_cipher(mk(), pk(), enc.cipher, s[0], k_new);
    EXPECT_EQ(scope.delta().cipher_exps(), 3u);
    EXPECT_EQ(scope.delta().g2_exp, 2u);
    const std::vector<std::string> rest(s.begin() + 1, s.end());
    const auto fresh = encrypt_master(mk(), pk(), rest, k_new);
    EXPECT_EQ(removed.cipher, fresh.cipher);
    EXPECT_EQ(removed.key, fresh.key);
    if (n == 2) {
      EXPECT_EQ(decrypt(pk(), rest, rest[0], extract_user_key(mk(), rest[0]), removed.cipher),
                removed.key);
      // The removed user, still listing itself, no longer gets the key.
      EXPECT_NE(decrypt(pk(), s, s[0], extract_user_key(mk(), s[0]), removed.cipher),
                removed.key);
    }
  }
}

TEST_F(IbbeTest, RekeyMatchesFreshEncryption) {
  const auto s = make_ids(5);
  const auto enc = encrypt_master(mk(), pk(), s, Scalar::random(rng));
  const Scalar k1 = Scalar::random(rng);
  const Scalar k2 = Scalar::random(rng);
  CountScope scope;
  const auto r1 = rekey_cipher(pk(), enc.cipher, k1);
  EXPECT_EQ(scope.delta().cipher_exps(), 2u);
  EXPECT_EQ(r1.cipher, encrypt_master(mk(), pk(), s, k1).cipher);
  EXPECT_EQ(r1.cipher.c3, enc.cipher.c3);
  EXPECT_EQ(rekey_cipher(pk(), r1.cipher, k2).cipher, rekey_cipher(pk(), enc.cipher, k2).cipher);
  for (const auto& id : s)
    EXPECT_EQ(decrypt(pk(), s, id, extract_user_key(mk(), id), r1.cipher), r1.key);
}

TEST_F(IbbeTest, IncrementalAdditionEqualsBatchEncryption) {
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = make_ids(1 + rng.uniform(12), "inc" + std::to_string(trial) + "-");
    const Scalar k = Scalar::random(rng);
    const std::vector<std::string> first = {s.front()};
    auto enc = encrypt_master(mk(), pk(), first, k);
    for (std::size_t i = 1; i < s.size(); ++i)
      enc.cipher = add_user_to_cipher(mk(), enc.cipher, s[i]);
    EXPECT_EQ(enc.cipher, encrypt_master(mk(), pk(), s, k).cipher);
    EXPECT_EQ(enc.cipher.c2, exp_g2(enc.cipher.c3, k));
  }
}

TEST_F(IbbeTest, DecryptCostIsQuadraticInReceiverCount) {
  auto local = crypto::Rng::seeded(3);
  const auto big = setup(*ctx_, 256, local);
  std::vector<std::uint64_t> ops;
  for (std::size_t n : {64u, 128u, 256u}) {
    const auto s = make_ids(n);
    const auto enc = encrypt_master(big.master, big.pub, s, Scalar::random(rng));
    const UserKey uk = extract_user_key(big.master, s[n / 2]);
    CountScope scope;
    EXPECT_EQ(decrypt(big.pub, s, s[n / 2], uk, enc.cipher), enc.key);
    ops.push_back(scope.delta().scalar_ops());
    EXPECT_EQ(scope.delta().pairings, 2u);
  }
  for (std::size_t i = 1; i < ops.size(); ++i) {
    const double ratio = static_cast<double>(ops[i]) / static_cast<double>(ops[i - 1]);
    EXPECT_GE(ratio, 3.5);
    EXPECT_LE(ratio, 4.5);
  }
}

TEST_F(IbbeTest, WireFormatsRoundTrip) {
  const auto enc = encrypt_master(mk(), pk(), make_ids(3), Scalar::random(rng));
  const Bytes wire = enc.cipher.serialize();
  EXPECT_EQ(to_string(ByteView(wire).first(5)), "IBBC1");
  EXPECT_EQ(BroadcastCipher::deserialize(wire), enc.cipher);
  EXPECT_EQ(code_of([&] { BroadcastCipher::deserialize(ByteView(wire).first(100)); }),
            ErrorCode::kParse);

  auto local = crypto::Rng::seeded(5);
  const auto small = setup(*ctx_, 3, local);
  const Bytes pkb = small.pub.serialize();
  EXPECT_EQ(pkb.size(), 5 + 4 + algebra::kG1Size + algebra::kGtSize + 4 * algebra::kG2Size);
  const PublicKey back = PublicKey::deserialize(pkb);
  EXPECT_EQ(back.w, small.pub.w);
  EXPECT_EQ(back.v, small.pub.v);
  EXPECT_EQ(back.h_powers, small.pub.h_powers);

  const UserKey uk = extract_user_key(mk(), "carol");
  const UserKey uk2 = UserKey::deserialize(uk.serialize());
  EXPECT_EQ(uk2.user_id, "carol");
  EXPECT_EQ(uk2.sk, uk.sk);

  const MasterKey mk2 = MasterKey::deserialize(mk().serialize());
  EXPECT_EQ(mk2.gamma, mk().gamma);
  EXPECT_EQ(mk2.g, mk().g);
}

}  // namespace
}  // namespace ibbesgx::ibbe
