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

#include "ibbesgx/bytes.hpp"

#include <gtest/gtest.h>

#include "ibbesgx/error.hpp"

namespace ibbesgx {
namespace {

TEST(Bytes, WriterReaderBigEndian) {
  ByteWriter w;
  w.raw("MAG").u8(7).u16(0x0102).u32(0x03040506).u64(0x0708090a0b0c0d0e).lp("id");
  const Bytes b = std::move(w).take();
  EXPECT_EQ(hex(b), "4d414707010203040506" "0708090a0b0c0d0e" "000000026964");

  ByteReader r(b);
  r.expect("MAG");
  EXPECT_EQ(r.u8(), 7);
  EXPECT_EQ(r.u16(), 0x0102);
  EXPECT_EQ(r.u32(), 0x03040506u);
  EXPECT_EQ(r.u64(), 0x0708090a0b0c0d0eull);
  EXPECT_EQ(r.lp_string(), "id");
  EXPECT_TRUE(r.done());
}

TEST(Bytes, TruncatedReadIsParseError) {
  const Bytes b = {0, 0, 0, 9, 'x'};
  ByteReader r(b);
  try {
    r.lp();
    FAIL() << "expected parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(Bytes, BadMagic) {
  const Bytes b = to_bytes("NOPE");
  ByteReader r(b);
  EXPECT_THROW(r.expect("GPT1"), Error);
}

TEST(Bytes, HexRoundTrip) {
  const Bytes b = {0x00, 0xff, 0x10, 0xab};
  EXPECT_EQ(from_hex(hex(b)), b);
  EXPECT_THROW(from_hex("abc"), Error);
  EXPECT_THROW(from_hex("zz"), Error);
}

TEST(Bytes, Contains) {
  const Bytes hay = to_bytes("the quick brown fox");
  EXPECT_TRUE(contains(hay, as_bytes("brown")));
  EXPECT_FALSE(contains(hay, as_bytes("brawn")));
}

}  // namespace
}  // namespace ibbesgx
