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

#include <gtest/gtest.h>

#include <set>

#include "enclave_access.hpp"
#include "ibbesgx/error.hpp"
#include "ibbesgx/op_counts.hpp"
#include "test_util.hpp"

namespace ibbesgx::groups {
namespace {

using enclave::Enclave;
using enclave::EnclaveTestAccess;
using ibbesgx::testing::code_of;

const algebra::PairingCtx& ctx() {
  static const algebra::PairingCtx c;
  return c;
}

std::vector<std::string> ids(std::size_t n, const std::string& prefix = "u") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

class GroupsTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    enclave_ = new Enclave(ctx(), 16, crypto::Rng::seeded(1234));
  }
  static void TearDownTestSuite() { delete enclave_; }

  Enclave& e() { return *enclave_; }
  Key32 gk(const GroupState& gs) { return EnclaveTestAccess::gk(e(), gs.sealed_gk); }
  Key32 derive(const GroupState& gs, const std::string& user) {
    return derive_group_key(e().public_key(), gs.partition_of(user), user,
                            e().extract_user_key(user));
  }
  void expect_all_derive(const GroupState& gs) {
    const Key32 want = gk(gs);
    for (const auto& m : gs.members()) EXPECT_EQ(derive(gs, m), want) << m;
  }
  // Any attempt by `user` against any partition of `gs` must fail.
  void expect_locked_out(const GroupState& gs, const std::string& user) {
    const ibbe::UserKey uk = e().extract_user_key(user);
    for (const auto& p : gs.partitions) {
      EXPECT_EQ(code_of([&] { derive_group_key(e().public_key(), p, user, uk); }),
                ErrorCode::kAuthentication);
      // Even after inserting itself into the member list.
      Partition forged = p;
      forged.members.push_back(user);
      EXPECT_EQ(code_of([&] { derive_group_key(e().public_key(), forged, user, uk); }),
                ErrorCode::kAuthentication);
    }
  }

  static Enclave* enclave_;
};

Enclave* GroupsTest::enclave_ = nullptr;

TEST(ChunkTest, ConsecutiveChunks) {
  const auto s = ids(7);
  const auto c = chunk(s, 3);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], (std::vector<std::string>{"u0", "u1", "u2"}));
  EXPECT_EQ(c[2], (std::vector<std::string>{"u6"}));
  EXPECT_EQ(chunk(s, 7).size(), 1u);
  EXPECT_EQ(chunk(s, 1).size(), 7u);
}

TEST(RepartitionRuleTest, Threshold) {
  EXPECT_EQ(sparse_threshold(3), 2u);
  EXPECT_EQ(sparse_threshold(4), 3u);
  EXPECT_EQ(sparse_threshold(1), 1u);
  EXPECT_EQ(sparse_threshold(1000), 667u);
}

TEST_F(GroupsTest, CreateChunksAndEveryMemberDerives) {
  const auto s = ids(7);
  const GroupState gs = create_group(e(), "g", s, 3);
  EXPECT_EQ(gs.partition_sizes(), (std::vector<std::size_t>{3, 3, 1}));
  gs.check_invariants();
  expect_all_derive(gs);
  expect_locked_out(gs, "outsider");
}

TEST_F(GroupsTest, DeriveAcrossPartitionSizes) {
  for (std::size_t n : {1u, 4u, 16u}) {
    const GroupState gs = create_group(e(), "g", ids(20), n);
    EXPECT_EQ(gs.partitions.size(), (20 + n - 1) / n);
    expect_all_derive(gs);
  }
}

TEST_F(GroupsTest, CreateRejectsBadInput) {
  const std::vector<std::string> dup = {"a", "b", "a"};
  EXPECT_EQ(code_of([&] { create_group(e(), "g", dup, 2); }), ErrorCode::kDuplicate);
  EXPECT_EQ(code_of([&] { create_group(e(), "g", {}, 2); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { create_group(e(), "g", ids(3), 0); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { create_group(e(), "g", ids(3), 17); }), ErrorCode::kCapacity);
}

TEST_F(GroupsTest, MetadataGrowsWithPartitionCount) {
  for (std::size_t n_members : {1u, 10u, 40u}) {
    const auto s = ids(n_members);
    const GroupState gs = create_group(e(), "g", s, 8);
    const std::size_t m = (n_members + 7) / 8;
    EXPECT_EQ(gs.envelope_bytes(), m * Partition::kEnvelopeSize);
    EXPECT_EQ(Partition::kEnvelopeSize, 245u + 12u + 48u);
    std::size_t index = 0;
    for (const auto& id : s) index += 4 + id.size();
    // magic + id + count + y length per partition, plus the member list.
    EXPECT_EQ(gs.metadata_bytes(), m * (Partition::kEnvelopeSize + 4 + 4 + 4 + 4) + index);
  }
}

TEST_F(GroupsTest, AddFillsLowestNonFullPartition) {
  GroupState gs = create_group(e(), "g", ids(5), 3);
  ASSERT_EQ(gs.partition_sizes(), (std::vector<std::size_t>{3, 2}));
  const Key32 before = gk(gs);
  const Bytes y_before = gs.partitions[1].y;
  CountScope scope;
  add_user(e(), gs, "new");
  EXPECT_EQ(scope.delta().g2_exp, 2u);
  EXPECT_EQ(scope.delta().group_exps(), 2u);
  EXPECT_EQ(gs.partition_sizes(), (std::vector<std::size_t>{3, 3}));
  EXPECT_EQ(gs.partitions[1].y, y_before);
  EXPECT_EQ(gk(gs), before);
  gs.check_invariants();
  expect_all_derive(gs);
  EXPECT_EQ(code_of([&] { add_user(e(), gs, "new"); }), ErrorCode::kAlreadyMember);
}

TEST_F(GroupsTest, AddOpensSingletonWhenAllFull) {
  GroupState gs = create_group(e(), "g", ids(6), 3);
  const Key32 before = gk(gs);
  CountScope scope;
  add_user(e(), gs, "extra");
  // Fresh singleton encryption: w^-k, h^(gamma + H), C3^k, v^k.
  EXPECT_EQ(scope.delta().group_exps(), 4u);
  EXPECT_EQ(gs.partition_sizes(), (std::vector<std::size_t>{3, 3, 1}));
  EXPECT_EQ(gs.partitions.back().id, 2u);
  EXPECT_EQ(gk(gs), before);
  gs.check_invariants();
  expect_all_derive(gs);
}

TEST_F(GroupsTest, AddCostIndependentOfGroupSize) {
  std::vector<std::uint64_t> costs;
  for (std::size_t size : {3u, 30u}) {
    GroupState gs = create_group(e(), "g", ids(size), 4);
    CountScope scope;
    add_user(e(), gs, "x");
    costs.push_back(scope.delta().group_exps());
  }
  EXPECT_EQ(costs[0], costs[1]);
}

TEST_F(GroupsTest, RemoveRotatesKeyAndLocksOut) {
  GroupState gs = create_group(e(), "g", ids(6), 3);
  const GroupState old = gs;
  const Key32 before = gk(gs);
  remove_user(e(), gs, "u0");
  EXPECT_EQ(gs.partition_sizes(), (std::vector<std::size_t>{2, 3}));
  EXPECT_NE(gk(gs), before);
  gs.check_invariants();
  expect_all_derive(gs);
  expect_locked_out(gs, "u0");
  // Lazy revocation: the snapshot taken before removal still yields the old key.
  EXPECT_EQ(derive_group_key(e().public_key(), old.partition_of("u0"), "u0",
                             e().extract_user_key("u0")),
            before);
  EXPECT_EQ(code_of([&] { remove_user(e(), gs, "u0"); }), ErrorCode::kNotMember);
}

TEST_F(GroupsTest, RemoveDropsEmptiedPartition) {
  GroupState gs = create_group(e(), "g", ids(7), 3);
  remove_user(e(), gs, "u6");
  EXPECT_EQ(gs.partition_sizes(), (std::vector<std::size_t>{3, 3}));
  gs.check_invariants();
  expect_all_derive(gs);
  // Emptying the whole group still rotates the key, and re-adding works.
  GroupState solo = create_group(e(), "s", ids(1), 3);
  const Key32 before = gk(solo);
  remove_user(e(), solo, "u0");
  EXPECT_TRUE(solo.partitions.empty());
  EXPECT_NE(gk(solo), before);
  add_user(e(), solo, "u9");
  expect_all_derive(solo);
}

TEST_F(GroupsTest, RemoveCostLinearInPartitionsOnly) {
  auto cost = [&](std::size_t members, std::size_t n) {
    GroupState gs = create_group(e(), "g", ids(members), n);
    CountScope scope;
    remove_user(e(), gs, "u0");
    return scope.delta();
  };
  // m partitions: 2 G2 for the affected one plus 1 per re-keyed partition.
  for (std::size_t m : {1u, 2u, 4u}) EXPECT_EQ(cost(4 * m, 4).g2_exp, m + 1);
  // Fixed m = 2, different N.
  EXPECT_EQ(cost(8, 4).group_exps(), cost(32, 16).group_exps());
}

TEST_F(GroupsTest, RepartitionHeuristic) {
  GroupState gs = create_group(e(), "g", ids(6), 3);
  EXPECT_FALSE(should_repartition(gs));  // [3,3]
  const GroupState untouched = gs;
  EXPECT_FALSE(maybe_repartition(e(), gs));
  EXPECT_EQ(gs.partitions[0].cipher, untouched.partitions[0].cipher);

  remove_user(e(), gs, "u0");
  remove_user(e(), gs, "u3");
  ASSERT_EQ(gs.partition_sizes(), (std::vector<std::size_t>{2, 2}));
  const Key32 before = gk(gs);
  const auto members = gs.members();
  EXPECT_TRUE(maybe_repartition(e(), gs));
  EXPECT_EQ(gs.partition_sizes(), (std::vector<std::size_t>{3, 1}));
  EXPECT_EQ(gs.members(), members);
  EXPECT_EQ(gk(gs), before);
  gs.check_invariants();
  expect_all_derive(gs);

  GroupState single = create_group(e(), "g", ids(1), 3);
  EXPECT_FALSE(should_repartition(single));
}

TEST_F(GroupsTest, DeriveCostQuadraticInPartitionNotGroup) {
  auto ops = [&](std::size_t members, std::size_t n) {
    const GroupState gs = create_group(e(), "g", ids(members), n);
    CountScope scope;
    derive(gs, "u1");
    return scope.delta().scalar_ops();
  };
  EXPECT_EQ(ops(16, 8), ops(64, 8));
  const double r = static_cast<double>(ops(16, 16)) / static_cast<double>(ops(8, 8));
  EXPECT_GT(r, 3.0);
}

TEST_F(GroupsTest, RandomInterleavingKeepsInvariants) {
  auto rng = crypto::Rng::seeded(77);
  GroupState gs = create_group(e(), "g", ids(5, "s"), 4);
  std::set<std::string> removed;
  std::vector<std::pair<GroupState, Key32>> snapshots;
  int next = 0;
  for (int step = 0; step < 60; ++step) {
    const auto members = gs.members();
    const auto action = rng.uniform(10);
    if (action < 5 || members.empty()) {
      const std::string u = "n" + std::to_string(next++);
      add_user(e(), gs, u);
    } else if (action < 9) {
      const std::string& u = members[rng.uniform(members.size())];
      snapshots.emplace_back(gs, gk(gs));
      remove_user(e(), gs, u);
      removed.insert(u);
      maybe_repartition(e(), gs);
    } else {
      maybe_repartition(e(), gs);
    }
    gs.check_invariants();
    EXPECT_EQ(gs.user_index.size(), gs.member_count());
  }
  expect_all_derive(gs);
  for (const auto& u : removed)
    if (!gs.contains(u)) expect_locked_out(gs, u);
  // Old snapshots keep working for whoever was a member then.
  for (const auto& [snap, key] : snapshots)
    for (const auto& m : snap.members()) {
      EXPECT_EQ(derive(snap, m), key);
      break;
    }
}

TEST_F(GroupsTest, PersistenceRoundTrip) {
  store::MemoryStore st;
  GroupAdmin admin(e(), &st);
  admin.create("grp", ids(7), 3);
  EXPECT_EQ(st.list("grp/"),
            (std::vector<std::string>{"grp/00000000", "grp/00000001", "grp/00000002"}));
  EXPECT_TRUE(st.exists("grp.sealed_gk"));
  const Bytes file = st.get("grp/00000001");
  EXPECT_EQ(to_string(ByteView(file).first(4)), "GPT1");
  EXPECT_EQ(Partition::deserialize(file).serialize(), file);

  admin.remove("u6");
  EXPECT_EQ(st.list("grp/").size(), 2u);
  const GroupState loaded = load(st, "grp", 3);
  EXPECT_EQ(loaded.members(), admin.state().members());
  EXPECT_EQ(loaded.sealed_gk, admin.state().sealed_gk);
  EXPECT_EQ(loaded.next_partition_id, 2u);
  const Partition p = load_partition(st, "grp", 1);
  EXPECT_EQ(derive_group_key(e().public_key(), p, "u4", e().extract_user_key("u4")),
            gk(admin.state()));
  EXPECT_EQ(st.total_bytes("grp/"), admin.state().metadata_bytes());
}

TEST_F(GroupsTest, AdminRepartitionsAfterRemove) {
  GroupAdmin admin(e());
  admin.create("g", ids(9), 3);
  admin.remove("u0");
  EXPECT_EQ(admin.repartitions(), 0u);  // [2,3,3]
  admin.remove("u3");                   // [2,2,3] -> [3,3,1]
  EXPECT_EQ(admin.repartitions(), 1u);
  EXPECT_EQ(admin.state().partition_sizes(), (std::vector<std::size_t>{3, 3, 1}));
  expect_all_derive(admin.state());
}

}  // namespace
}  // namespace ibbesgx::groups
