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

#pragma once

// Measurement harness behind the command-line tool: micro-benchmarks per
// operation and scheme, trace replay, and CSV rendering.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ibbesgx/op_counts.hpp"
#include "ibbesgx/trace.hpp"

namespace ibbesgx::bench {

enum class Scheme { kIbbeSgx, kHe };

Scheme parse_scheme(std::string_view s);
std::string_view to_string(Scheme s);

/// "A", "A..B" (doubling) or "A..B xF" / "A..BxF" (factor F); B is always
/// included. Also accepts a comma-separated list.
std::vector<std::size_t> parse_range(std::string_view spec);

struct BenchRecord {
  std::string scheme;
  std::string operation;
  std::size_t group_size = 0;
  std::size_t partition_size = 0;
  std::size_t iterations = 0;
  double median_us = 0;
  double mean_us = 0;
  OpCounts counters;  // one iteration
  std::size_t metadata_bytes = 0;
};

std::string csv_header();
std::string to_csv(const BenchRecord& r);

struct BenchConfig {
  Scheme scheme = Scheme::kIbbeSgx;
  std::size_t group_size = 1000;
  std::size_t partition_size = 1000;
  std::size_t iterations = 10;
  std::size_t warmup = 2;
  std::uint64_t seed = 1;
  bool indexed = false;  // envelope only
};

inline constexpr std::string_view kOperations[] = {"setup",  "extract", "create", "add",
                                                   "remove", "decrypt", "envelope"};

/// kInvalidArgument for an unknown operation or a combination the scheme
/// does not support (setup/extract under HE).
BenchRecord run(std::string_view operation, const BenchConfig& cfg);

struct ReplayConfig {
  Scheme scheme = Scheme::kIbbeSgx;
  std::size_t partition_size = 1000;
  std::uint64_t seed = 1;
  std::size_t derive_samples = 8;
};

struct ReplaySummary {
  std::string scheme;
  std::size_t partition_size = 0;
  std::size_t ops = 0;
  std::size_t adds = 0;
  std::size_t removes = 0;
  std::size_t repartitions = 0;
  double admin_seconds = 0;
  OpCounts admin_counters;
  std::size_t derive_samples = 0;
  double mean_derive_us = 0;
  OpCounts derive_counters;  // mean per derivation, rounded down
  std::size_t final_members = 0;
  std::size_t final_partitions = 0;
  std::size_t final_metadata_bytes = 0;
  std::vector<std::string> final_membership;  // sorted; not part of the CSV
};

ReplaySummary replay(const std::vector<trace::TraceOp>& ops, const ReplayConfig& cfg);

std::string replay_csv_header();
std::string to_csv(const ReplaySummary& s);

}  // namespace ibbesgx::bench
