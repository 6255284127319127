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

#include "ibbesgx/hybrid.hpp"

#include <gtest/gtest.h>

#include "ibbesgx/op_counts.hpp"
#include "test_util.hpp"

namespace ibbesgx::hybrid {
namespace {

using ibbesgx::testing::code_of;

struct Fixture {
  crypto::Rng rng = crypto::Rng::seeded(17);
  std::map<std::string, HEUserKeyPair> users;
  Directory directory;

  std::vector<std::pair<std::string, Key32>> make(std::size_t n, std::size_t start = 0) {
    std::vector<std::pair<std::string, Key32>> out;
    for (std::size_t i = start; i < start + n; ++i) {
      // Fixed-width ids keep the metadata size exactly affine.
      char id[32];
      std::snprintf(id, sizeof(id), "user%06zu", i);
      auto kp = HEUserKeyPair::generate(id, rng);
      directory[id] = kp.keys.public_key;
      out.emplace_back(id, kp.keys.public_key);
      users.emplace(id, std::move(kp));
    }
    return out;
  }
  const Key32& priv(const std::string& id) { return users.at(id).keys.private_key; }
};

TEST(HybridTest, SingleMemberHasOneEntry) {
  Fixture f;
  const auto m = f.make(1);
  const Key32 gk = f.rng.key32();
  const auto meta = he_create_group("g", m, gk, f.rng);
  EXPECT_EQ(meta.member_count(), 1u);
  EXPECT_EQ(he_unwrap(meta, m[0].first, f.priv(m[0].first)), gk);
  EXPECT_EQ(HEEntry::kSize, 92u);
}

TEST(HybridTest, EveryMemberUnwrapsNonMembersFail) {
  Fixture f;
  const auto m = f.make(8);
  const auto outsider = f.make(1, 100);
  const Key32 gk = f.rng.key32();
  CountScope scope;
  const auto meta = he_create_group("g", m, gk, f.rng);
  EXPECT_EQ(scope.delta().he_wrap, 8u);
  for (const auto& [id, _] : m) EXPECT_EQ(he_unwrap(meta, id, f.priv(id)), gk);
  EXPECT_EQ(code_of([&] { he_unwrap(meta, outsider[0].first, f.priv(outsider[0].first)); }),
            ErrorCode::kNotMember);
  // Someone else's private key against a member's entry.
  EXPECT_EQ(code_of([&] { he_unwrap(meta, m[0].first, f.priv(m[1].first)); }),
            ErrorCode::kAuthentication);
  const std::vector<std::pair<std::string, Key32>> dup = {m[0], m[0]};
  EXPECT_EQ(code_of([&] { he_create_group("g", dup, gk, f.rng); }), ErrorCode::kDuplicate);
}

TEST(HybridTest, MetadataBytesExactlyAffine) {
  Fixture f;
  const Key32 gk = f.rng.key32();
  std::vector<std::pair<std::size_t, std::size_t>> points;
  for (std::size_t n : {1u, 10u, 100u, 1000u}) {
    Fixture g;
    const auto meta = he_create_group("g", g.make(n), gk, g.rng);
    const std::size_t bytes = meta.serialize().size();
    EXPECT_EQ(bytes, meta.metadata_bytes());
    points.emplace_back(n, bytes);
  }
  const std::size_t slope = (points[1].second - points[0].second) / 9;
  EXPECT_EQ(slope, 4u + 10u + HEEntry::kSize);
  for (const auto& [n, bytes] : points)
    EXPECT_EQ(bytes, HEGroupMeta::kHeaderSize + n * slope) << n;
}

TEST(HybridTest, AddIsOneWrapRemoveRewrapsRest) {
  Fixture f;
  const auto m = f.make(10);
  const auto extra = f.make(1, 50);
  const Key32 gk = f.rng.key32();
  auto meta = he_create_group("g", m, gk, f.rng);
  {
    CountScope scope;
    he_add_user(meta, extra[0].first, extra[0].second, gk, f.rng);
    EXPECT_EQ(scope.delta().he_wrap, 1u);
  }
  EXPECT_EQ(he_unwrap(meta, extra[0].first, f.priv(extra[0].first)), gk);
  EXPECT_EQ(code_of([&] { he_add_user(meta, extra[0].first, extra[0].second, gk, f.rng); }),
            ErrorCode::kAlreadyMember);

  const HEGroupMeta before = meta;
  const Key32 gk2 = f.rng.key32();
  {
    CountScope scope;
    he_remove_user(meta, m[3].first, f.directory, gk2, f.rng);
    EXPECT_EQ(scope.delta().he_wrap, 10u);  // N - 1 of the 11 members
  }
  EXPECT_EQ(code_of([&] { he_unwrap(meta, m[3].first, f.priv(m[3].first)); }),
            ErrorCode::kNotMember);
  for (const auto& [id, _] : meta.entries) EXPECT_EQ(he_unwrap(meta, id, f.priv(id)), gk2);
  // The old snapshot still opens to the old key.
  EXPECT_EQ(he_unwrap(before, m[3].first, f.priv(m[3].first)), gk);
  EXPECT_EQ(code_of([&] { he_remove_user(meta, m[3].first, f.directory, gk2, f.rng); }),
            ErrorCode::kNotMember);
}

TEST(HybridTest, WireFormatRoundTrip) {
  Fixture f;
  const Key32 gk = f.rng.key32();
  const auto meta = he_create_group("g", f.make(3), gk, f.rng);
  const Bytes wire = meta.serialize();
  EXPECT_EQ(to_string(ByteView(wire).first(5)), "HEGM1");
  const auto back = HEGroupMeta::deserialize(wire, "g");
  EXPECT_EQ(back.entries, meta.entries);
  EXPECT_EQ(back.serialize(), wire);
  EXPECT_EQ(code_of([&] { HEGroupMeta::deserialize(ByteView(wire).first(wire.size() - 1)); }),
            ErrorCode::kParse);
  EXPECT_FALSE(contains(wire, gk));
}

TEST(HybridTest, EntryBoundToUserId) {
  Fixture f;
  const auto m = f.make(2);
  const Key32 gk = f.rng.key32();
  auto meta = he_create_group("g", m, gk, f.rng);
  // Move a's entry under b's name: AAD mismatch even with a's own key.
  auto swapped = meta;
  swapped.entries[m[1].first] = meta.entries[m[0].first];
  EXPECT_EQ(code_of([&] { he_unwrap(swapped, m[1].first, f.priv(m[0].first)); }),
            ErrorCode::kAuthentication);
}

}  // namespace
}  // namespace ibbesgx::hybrid
