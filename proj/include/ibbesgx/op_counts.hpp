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

#include <cstdint>
#include <ostream>
#include <string_view>
#include <utility>
#include <vector>

namespace ibbesgx {

// Exact operation tallies. Complexity claims are asserted on these rather
// than on wall-clock time.
struct OpCounts {
  std::uint64_t g1_exp = 0;
  std::uint64_t g2_exp = 0;
  std::uint64_t gt_exp = 0;
  std::uint64_t g2_multi_exp = 0;        // calls
  std::uint64_t g2_multi_exp_terms = 0;  // bases folded across all calls
  std::uint64_t pairings = 0;
  std::uint64_t scalar_mul = 0;
  std::uint64_t scalar_add = 0;  // additions and subtractions
  std::uint64_t scalar_inv = 0;
  std::uint64_t hash_to_scalar = 0;
  std::uint64_t aead_encrypt = 0;
  std::uint64_t aead_decrypt = 0;
  std::uint64_t he_wrap = 0;
  std::uint64_t he_unwrap = 0;

  // Exponentiations producing ciphertext components (G1 and G2).
  std::uint64_t cipher_exps() const { return g1_exp + g2_exp; }
  // All group exponentiations, counting each multi-exp term as one.
  std::uint64_t group_exps() const {
    return g1_exp + g2_exp + gt_exp + g2_multi_exp_terms;
  }
  std::uint64_t scalar_ops() const { return scalar_mul + scalar_add + scalar_inv; }

  // (name, value) for every raw counter, in declaration order.
  std::vector<std::pair<std::string_view, std::uint64_t>> fields() const;

  OpCounts& operator+=(const OpCounts& o);
  OpCounts& operator-=(const OpCounts& o);
  // Per-field integer division, for averaging.
  OpCounts& operator/=(std::uint64_t d);
  friend OpCounts operator+(OpCounts a, const OpCounts& b) { return a += b; }
  friend OpCounts operator-(OpCounts a, const OpCounts& b) { return a -= b; }
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

std::ostream& operator<<(std::ostream& os, const OpCounts& c);

namespace counters {

// Counters are per thread: each thread reports only the work it performed.
OpCounts& local();
inline OpCounts snapshot() { return local(); }

}  // namespace counters

// Reports the operations performed on this thread since construction.
class CountScope {
 public:
  CountScope() : start_(counters::snapshot()) {}
  OpCounts delta() const { return counters::snapshot() - start_; }

 private:
  OpCounts start_;
};

}  // namespace ibbesgx
