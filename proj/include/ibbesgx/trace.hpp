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

// Membership traces: sequences of add/remove operations replayed against
// the group managers.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ibbesgx::trace {

struct TraceOp {
  enum class Kind { kAdd, kRemove };

  Kind op = Kind::kAdd;
  std::string user_id;

  friend bool operator==(const TraceOp&, const TraceOp&) = default;
};

struct TraceStats {
  std::size_t adds = 0;
  std::size_t removes = 0;
  std::size_t peak_members = 0;
  std::size_t final_members = 0;
};

/// `n_ops` operations of which about `revocation_ratio * n_ops` are
/// removals. A removal drawn while the group is empty becomes an addition
/// and is paid back by the next addition drawn while the group is not.
/// Removed users are picked uniformly; added users get fresh ids.
std::vector<TraceOp> gen_synthetic(std::size_t n_ops, double revocation_ratio,
                                   std::uint64_t seed);

/// CSV "op,user_id" lines, optional header, "\n" (or "\r\n") terminators.
/// Validates that adds target absent users and removes present ones.
/// Errors are kParse with the 1-based line number in the message.
std::vector<TraceOp> parse_trace(std::string_view csv);

/// Writes the header and one line per op.
std::string serialize_trace(const std::vector<TraceOp>& ops);

/// Throws kParse if the sequence violates the membership invariants.
TraceStats validate(const std::vector<TraceOp>& ops);

std::string_view to_string(TraceOp::Kind k);

}  // namespace ibbesgx::trace
