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

#include "ibbesgx/op_counts.hpp"

namespace ibbesgx {

#define IBBESGX_FOR_EACH_COUNTER(X)                                      \
  X(g1_exp) X(g2_exp) X(gt_exp) X(g2_multi_exp) X(g2_multi_exp_terms)    \
  X(pairings) X(scalar_mul) X(scalar_add) X(scalar_inv) X(hash_to_scalar) \
  X(aead_encrypt) X(aead_decrypt) X(he_wrap) X(he_unwrap)

std::vector<std::pair<std::string_view, std::uint64_t>> OpCounts::fields() const {
  std::vector<std::pair<std::string_view, std::uint64_t>> out;
#define X(f) out.emplace_back(#f, f);
  IBBESGX_FOR_EACH_COUNTER(X)
#undef X
  return out;
}

OpCounts& OpCounts::operator+=(const OpCounts& o) {
#define X(f) f += o.f;
  IBBESGX_FOR_EACH_COUNTER(X)
#undef X
  return *this;
}

OpCounts& OpCounts::operator-=(const OpCounts& o) {
#define X(f) f -= o.f;
  IBBESGX_FOR_EACH_COUNTER(X)
#undef X
  return *this;
}

OpCounts& OpCounts::operator/=(std::uint64_t d) {
#define X(f) f /= d;
  IBBESGX_FOR_EACH_COUNTER(X)
#undef X
  return *this;
}

std::ostream& operator<<(std::ostream& os, const OpCounts& c) {
  os << "{";
  const char* sep = "";
#define X(f)                       \
  if (c.f != 0) {                  \
    os << sep << #f << "=" << c.f; \
    sep = ", ";                    \
  }
  IBBESGX_FOR_EACH_COUNTER(X)
#undef X
  return os << "}";
}

namespace counters {

OpCounts& local() {
  thread_local OpCounts counts;
  return counts;
}

}  // namespace counters
}  // namespace ibbesgx
