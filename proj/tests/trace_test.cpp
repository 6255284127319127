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

#include "ibbesgx/trace.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "test_util.hpp"

namespace ibbesgx::trace {
namespace {

using ibbesgx::testing::code_of;
using Kind = TraceOp::Kind;

std::size_t count(const std::vector<TraceOp>& ops, Kind k) {
  return static_cast<std::size_t>(
      std::count_if(ops.begin(), ops.end(), [&](const TraceOp& o) { return o.op == k; }));
}

std::string parse_error(std::string_view csv) {
  try {
    parse_trace(csv);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    return e.what();
  }
  ADD_FAILURE() << "no error for " << csv;
  return {};
}

TEST(TraceGenTest, RatioZeroIsAllAdds) {
  const auto ops = gen_synthetic(500, 0.0, 1);
  EXPECT_EQ(ops.size(), 500u);
  EXPECT_EQ(count(ops, Kind::kAdd), 500u);
}

TEST(TraceGenTest, RemovalCountTracksRatio) {
  for (double ratio : {0.05, 0.1, 0.2, 0.3, 0.45}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto ops = gen_synthetic(2000, ratio, seed);
      ASSERT_EQ(ops.size(), 2000u);
      const auto removes = static_cast<double>(count(ops, Kind::kRemove));
      EXPECT_NEAR(removes, ratio * 2000, 1.0) << ratio << " seed " << seed;
      EXPECT_NO_THROW(validate(ops));
    }
  }
}

TEST(TraceGenTest, RatioOneAlternates) {
  const auto ops = gen_synthetic(1000, 1.0, 7);
  EXPECT_EQ(count(ops, Kind::kAdd), 500u);
  EXPECT_EQ(count(ops, Kind::kRemove), 500u);
  for (std::size_t i = 0; i < ops.size(); ++i)
    EXPECT_EQ(ops[i].op, i % 2 == 0 ? Kind::kAdd : Kind::kRemove);
  EXPECT_EQ(validate(ops).peak_members, 1u);
}

TEST(TraceGenTest, DeterministicPerSeed) {
  EXPECT_EQ(gen_synthetic(300, 0.3, 42), gen_synthetic(300, 0.3, 42));
  EXPECT_NE(gen_synthetic(300, 0.3, 42), gen_synthetic(300, 0.3, 43));
  EXPECT_EQ(code_of([] { gen_synthetic(10, 1.5, 1); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { gen_synthetic(10, -0.1, 1); }), ErrorCode::kInvalidArgument);
  EXPECT_TRUE(gen_synthetic(0, 0.5, 1).empty());
}

TEST(TraceGenTest, IdsAreFresh) {
  const auto ops = gen_synthetic(1000, 0.4, 5);
  std::set<std::string> added;
  for (const auto& o : ops)
    if (o.op == Kind::kAdd) EXPECT_TRUE(added.insert(o.user_id).second);
}

TEST(TraceParseTest, Basic) {
  const auto ops = parse_trace("add,u1\nremove,u1");
  ASSERT_EQ(ops.size(), 2u);
  EXPECT_EQ(ops[0], (TraceOp{Kind::kAdd, "u1"}));
  EXPECT_EQ(ops[1], (TraceOp{Kind::kRemove, "u1"}));
  EXPECT_EQ(parse_trace("op,user_id\nadd,a\n").size(), 1u);
  EXPECT_EQ(parse_trace("add,a\r\nadd,b\r\n").size(), 2u);
  EXPECT_TRUE(parse_trace("").empty());
}

TEST(TraceParseTest, ErrorsCarryLineNumbers) {
  EXPECT_NE(parse_error("remove,u9").find("line 1"), std::string::npos);
  EXPECT_NE(parse_error("add,a\nadd,a\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("add,a\njump,a\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("add,a\n\nadd,b\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("op,user_id\nadd\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("add,\n").find("line 1"), std::string::npos);
  EXPECT_NE(parse_error("add,a,b\n").find("line 1"), std::string::npos);
}

TEST(TraceParseTest, SerializeRoundTrip) {
  for (double ratio : {0.0, 0.3, 1.0}) {
    const auto ops = gen_synthetic(400, ratio, 11);
    EXPECT_EQ(parse_trace(serialize_trace(ops)), ops);
  }
  EXPECT_EQ(serialize_trace({{Kind::kAdd, "x"}}), "op,user_id\nadd,x\n");
}

}  // namespace
}  // namespace ibbesgx::trace
