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

#include "ibbesgx/store.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <memory>

#include "ibbesgx/crypto.hpp"
#include "test_util.hpp"

namespace ibbesgx::store {
namespace {

using ibbesgx::testing::code_of;
using ibbesgx::testing::TempDir;

class StoreTest : public ::testing::TestWithParam<bool> {
 protected:
  void SetUp() override {
    if (GetParam())
      store_ = std::make_unique<FileStore>(dir_.path() / "root");
    else
      store_ = std::make_unique<MemoryStore>();
  }

  TempDir dir_;
  std::unique_ptr<ObjectStore> store_;
};

TEST_P(StoreTest, RoundTrip) {
  store_->put("g1/00000000", to_bytes("hello"));
  EXPECT_EQ(store_->get("g1/00000000"), to_bytes("hello"));
  store_->put("g1/00000000", to_bytes("world"));
  EXPECT_EQ(store_->get("g1/00000000"), to_bytes("world"));
  store_->put("empty", {});
  EXPECT_TRUE(store_->get("empty").empty());
  EXPECT_TRUE(store_->exists("empty"));
}

TEST_P(StoreTest, MissingIsNotFound) {
  EXPECT_EQ(code_of([&] { store_->get("nope"); }), ErrorCode::kNotFound);
  EXPECT_FALSE(store_->exists("nope"));
}

TEST_P(StoreTest, ListIsLexicographicAndPrefixed) {
  store_->put("g1/00000002", to_bytes("c"));
  store_->put("g1/00000000", to_bytes("a"));
  store_->put("g1/00000001", to_bytes("b"));
  store_->put("g10/00000000", to_bytes("x"));
  store_->put("g2/00000000", to_bytes("y"));
  const std::vector<std::string> want = {"g1/00000000", "g1/00000001", "g1/00000002"};
  EXPECT_EQ(store_->list("g1/"), want);
  EXPECT_EQ(store_->list().size(), 5u);
  EXPECT_EQ(store_->list("g1").size(), 4u);
  EXPECT_EQ(store_->total_bytes("g1/"), 3u);
}

TEST_P(StoreTest, DeleteIsIdempotent) {
  store_->put("a/b", to_bytes("1"));
  store_->remove("a/b");
  EXPECT_FALSE(store_->exists("a/b"));
  EXPECT_NO_THROW(store_->remove("a/b"));
  EXPECT_NO_THROW(store_->remove("never"));
}

TEST_P(StoreTest, RejectsMalformedIds) {
  for (const char* bad : {"", "/abs", "a//b", "../x", "a/../b", "a/.", "trail/", "a\\b",
                          "x.tmp~"}) {
    EXPECT_EQ(code_of([&] { store_->put(bad, to_bytes("z")); }), ErrorCode::kInvalidArgument)
        << bad;
    EXPECT_EQ(code_of([&] { store_->get(bad); }), ErrorCode::kInvalidArgument) << bad;
  }
}

INSTANTIATE_TEST_SUITE_P(Backends, StoreTest, ::testing::Values(false, true),
                         [](const auto& info) { return info.param ? "File" : "Memory"; });

TEST(FileStoreTest, OneFilePerObjectNoTempLeftovers) {
  TempDir dir;
  FileStore fs(dir.path());
  fs.put("grp/00000001", to_bytes("abc"));
  EXPECT_TRUE(std::filesystem::is_regular_file(dir.path() / "grp" / "00000001"));
  std::size_t files = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir.path()))
    files += e.is_regular_file();
  EXPECT_EQ(files, 1u);
  // A second instance over the same root sees the data.
  FileStore again(dir.path());
  EXPECT_EQ(again.get("grp/00000001"), to_bytes("abc"));
}

TEST(StoreDifferentialTest, BackendsAgreeOnRandomSequences) {
  TempDir dir;
  MemoryStore mem;
  FileStore file(dir.path());
  auto rng = crypto::Rng::seeded(2024);
  const std::vector<std::string> ids = {"a",      "b",   "g1/00000000", "g1/00000001",
                                        "g1/x/y", "g2/0", "g2/1",        "z"};
  const std::vector<std::string> prefixes = {"", "g", "g1/", "g2/", "a", "q"};
  for (int step = 0; step < 2000; ++step) {
    const std::string& id = ids[rng.uniform(ids.size())];
    switch (rng.uniform(4)) {
      case 0: {
        const Bytes data = rng.bytes(rng.uniform(64));
        mem.put(id, data);
        file.put(id, data);
        break;
      }
      case 1: {
        const ErrorCode none = ErrorCode::kCrypto;
        Bytes a, b;
        ErrorCode ea = none, eb = none;
        try { a = mem.get(id); } catch (const Error& e) { ea = e.code(); }
        try { b = file.get(id); } catch (const Error& e) { eb = e.code(); }
        ASSERT_EQ(ea, eb) << "step " << step;
        ASSERT_EQ(a, b) << "step " << step;
        break;
      }
      case 2:
        mem.remove(id);
        file.remove(id);
        break;
      default: {
        const std::string& p = prefixes[rng.uniform(prefixes.size())];
        ASSERT_EQ(mem.list(p), file.list(p)) << "step " << step;
      }
    }
  }
  EXPECT_EQ(mem.list(), file.list());
}

}  // namespace
}  // namespace ibbesgx::store
