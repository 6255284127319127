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

// Key envelope: one AEAD encryption of a file access key per reader.
//
// The indexed variant prefixes each fragment with a label
// SHA-224(reader_key || nonce) and keeps fragments sorted by label so a
// reader can locate its fragment by binary search.

#include <array>
#include <cstdint>
#include <vector>

#include "ibbesgx/bytes.hpp"
#include "ibbesgx/crypto.hpp"

namespace ibbesgx::asky {

enum class EnvelopeVariant : std::uint8_t { kStandard = 0, kIndexed = 1 };

inline constexpr std::size_t kLabelSize = 28;
inline constexpr std::size_t kNonceSize = 16;
inline constexpr std::size_t kKeyCtSize = 32;
inline constexpr std::size_t kStandardFragmentSize =
    crypto::kAeadIvSize + kKeyCtSize + crypto::kAeadTagSize;
inline constexpr std::size_t kIndexedFragmentSize = kLabelSize + kStandardFragmentSize;

using Label = crypto::Digest224;
using Nonce = std::array<std::uint8_t, kNonceSize>;

struct Fragment {
  Label label{};  // zero and not serialized in the standard variant
  crypto::Iv iv{};
  Key32 key_ct{};
  crypto::Tag tag{};

  friend bool operator==(const Fragment&, const Fragment&) = default;
};

struct Envelope {
  static constexpr std::string_view kMagic = "ASKE1";

  EnvelopeVariant variant = EnvelopeVariant::kStandard;
  Nonce nonce{};  // indexed only
  std::vector<Fragment> fragments;

  bool empty() const { return fragments.empty(); }
  std::size_t fragment_size() const {
    return variant == EnvelopeVariant::kIndexed ? kIndexedFragmentSize
                                                : kStandardFragmentSize;
  }
  // Nonce (if any) plus fragments, i.e. everything that scales with readers.
  std::size_t payload_bytes() const {
    return (variant == EnvelopeVariant::kIndexed ? kNonceSize : 0) +
           fragments.size() * fragment_size();
  }

  // "ASKE1" || variant (1B) || [nonce 16B] || count (4B BE) || fragments
  Bytes serialize() const;
  void write(ByteWriter& w) const;
  static Envelope read(ByteReader& r);
  static Envelope deserialize(ByteView b);

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

Label make_label(const Key32& reader_key, const Nonce& nonce);

// Seals `fk` for one reader. The label is left zero.
Fragment seal_fragment(const Key32& reader_key, const Key32& fk, crypto::Rng& rng);

// One AEAD trial.
std::optional<Key32> open_fragment(const Key32& reader_key, const Fragment& f);

}  // namespace ibbesgx::asky
