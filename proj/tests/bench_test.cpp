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

#include "ibbesgx/bench.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace ibbesgx::bench {
namespace {

using ibbesgx::testing::code_of;

std::size_t columns(const std::string& line) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

TEST(RangeTest, Forms) {
  EXPECT_EQ(parse_range("7"), (std::vector<std::size_t>{7}));
  EXPECT_EQ(parse_range("250..1000"), (std::vector<std::size_t>{250, 500, 1000}));
  EXPECT_EQ(parse_range("10..1000x10"), (std::vector<std::size_t>{10, 100, 1000}));
  EXPECT_EQ(parse_range("10..50x2"), (std::vector<std::size_t>{10, 20, 40, 50}));
  EXPECT_EQ(parse_range("5..5"), (std::vector<std::size_t>{5}));
  EXPECT_EQ(parse_range("1,4,16"), (std::vector<std::size_t>{1, 4, 16}));
  for (const char* bad : {"", "a", "0", "10..5", "1..10x1", "1..", "..4", "3,,4", "-2"})
    EXPECT_EQ(code_of([&] { parse_range(bad); }), ErrorCode::kInvalidArgument) << bad;
}

TEST(SchemeTest, Names) {
  EXPECT_EQ(parse_scheme("ibbe-sgx"), Scheme::kIbbeSgx);
  EXPECT_EQ(parse_scheme("he"), Scheme::kHe);
  EXPECT_EQ(to_string(Scheme::kHe), "he");
  EXPECT_EQ(code_of([] { parse_scheme("rsa"); }), ErrorCode::kInvalidArgument);
}

TEST(BenchRunTest, EveryOperationYieldsACompleteRow) {
  BenchConfig cfg;
  cfg.group_size = 12;
  cfg.partition_size = 4;
  cfg.iterations = 2;
  cfg.warmup = 1;
  const std::size_t width = columns(csv_header());
  for (const auto op : kOperations) {
    const BenchRecord r = run(op, cfg);
    EXPECT_EQ(r.operation, op);
    EXPECT_EQ(r.iterations, 2u);
    EXPECT_GT(r.metadata_bytes, 0u) << op;
    EXPECT_EQ(columns(to_csv(r)), width) << op;
  }
  cfg.scheme = Scheme::kHe;
  for (const auto op : {"create", "add", "remove", "decrypt"})
    EXPECT_EQ(columns(to_csv(run(op, cfg))), width);
  EXPECT_EQ(code_of([&] { run("setup", cfg); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { run("nope", cfg); }), ErrorCode::kInvalidArgument);
}

TEST(BenchRunTest, CountersMatchSchemeShape) {
  BenchConfig cfg;
  cfg.group_size = 40;
  cfg.partition_size = 10;
  cfg.iterations = 1;
  cfg.warmup = 0;
  const auto create = run("create", cfg);
  EXPECT_EQ(create.counters.scalar_mul, 40u);
  EXPECT_EQ(create.counters.g2_exp, 2u * 4u);
  const auto add = run("add", cfg);
  EXPECT_EQ(add.counters.group_exps(), 4u);  // all partitions full: new singleton
  const auto remove = run("remove", cfg);
  EXPECT_EQ(remove.counters.g2_exp, 4u + 1u);
  cfg.scheme = Scheme::kHe;
  EXPECT_EQ(run("remove", cfg).counters.he_wrap, 39u);
  EXPECT_EQ(run("add", cfg).counters.he_wrap, 1u);
  // Envelope bytes: header + 60 per reader.
  cfg.scheme = Scheme::kIbbeSgx;
  EXPECT_EQ(run("envelope", cfg).metadata_bytes, 10u + 60u * 40u);
  cfg.indexed = true;
  EXPECT_EQ(run("envelope", cfg).metadata_bytes, 10u + 16u + 88u * 40u);
}

TEST(BenchRunTest, HeMetadataAffineIbbeConstantPerPartition) {
  BenchConfig cfg;
  cfg.iterations = 1;
  cfg.warmup = 0;
  cfg.partition_size = 1000;
  cfg.scheme = Scheme::kHe;
  std::vector<std::size_t> he;
  for (std::size_t n : {100u, 200u, 300u}) {
    cfg.group_size = n;
    he.push_back(run("create", cfg).metadata_bytes);
  }
  EXPECT_EQ(he[2] - he[1], he[1] - he[0]);
}

TEST(ReplayTest, GroupsAndHybridAgreeOnMembership) {
  for (double ratio : {0.0, 0.3, 0.6}) {
    const auto ops = trace::gen_synthetic(300, ratio, 5);
    ReplayConfig cfg;
    cfg.partition_size = 16;
    cfg.derive_samples = 2;
    const ReplaySummary ib = replay(ops, cfg);
    cfg.scheme = Scheme::kHe;
    const ReplaySummary he = replay(ops, cfg);
    EXPECT_EQ(ib.final_membership, he.final_membership) << ratio;
    EXPECT_EQ(ib.final_members, trace::validate(ops).final_members);
    EXPECT_EQ(ib.adds + ib.removes, 300u);
  }
}

TEST(ReplayTest, RatioZeroMeansNoRepartitionAndDeterministicCounters) {
  const auto ops = trace::gen_synthetic(200, 0.0, 1);
  ReplayConfig cfg;
  cfg.partition_size = 32;
  cfg.derive_samples = 3;
  const ReplaySummary a = replay(ops, cfg);
  EXPECT_EQ(a.adds, 200u);
  EXPECT_EQ(a.repartitions, 0u);
  EXPECT_EQ(a.final_partitions, 7u);
  const ReplaySummary b = replay(ops, cfg);
  EXPECT_EQ(a.admin_counters, b.admin_counters);
  EXPECT_EQ(a.derive_counters, b.derive_counters);
  EXPECT_EQ(columns(to_csv(a)), columns(replay_csv_header()));
}

TEST(ReplayTest, RemovalsTriggerRekeys) {
  const auto ops = trace::gen_synthetic(200, 0.5, 2);
  ReplayConfig cfg;
  cfg.partition_size = 8;
  const ReplaySummary s = replay(ops, cfg);
  EXPECT_GT(s.removes, 0u);
  // Every removal seals a fresh group key.
  EXPECT_GE(s.admin_counters.aead_encrypt, s.removes);
}

}  // namespace
}  // namespace ibbesgx::bench
