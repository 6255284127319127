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

// Identity-based broadcast encryption with a trusted-execution shortcut.
//
// Besides the textbook public-key encryption (quadratic in the receiver set),
// holders of the master key may compute the ciphertext with a single running
// product over (gamma + H(u)), and the ciphertext carries a third, k-free
// component C3 = C2^(1/k) that makes member addition, removal and re-keying
// constant-time.
//
// All functions are deterministic given the session scalar k, which callers
// draw with algebra::Scalar::random.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ibbesgx/algebra.hpp"
#include "ibbesgx/bytes.hpp"
#include "ibbesgx/crypto.hpp"

namespace ibbesgx::ibbe {

using algebra::G1;
using algebra::G2;
using algebra::GT;
using algebra::PairingCtx;
using algebra::Scalar;

/// {g, gamma}. Only the enclave ever holds one of these.
struct MasterKey {
  G1 g;
  Scalar gamma;

  Bytes serialize() const;
  static MasterKey deserialize(ByteView b);
};

/// {w = g^gamma, v = e(g, h), h^(gamma^0) ... h^(gamma^n)}.
struct PublicKey {
  G1 w;
  GT v;
  std::vector<G2> h_powers;

  std::size_t max_set_size() const { return h_powers.size() - 1; }
  const G2& h() const { return h_powers.front(); }

  // "IBPK1" || n (u32 BE) || w || v || h_powers[0..n]
  Bytes serialize() const;
  static PublicKey deserialize(ByteView b);
};

/// g^(1 / (gamma + H(id))).
struct UserKey {
  std::string user_id;
  G1 sk;

  Bytes serialize() const;
  static UserKey deserialize(ByteView b);
};

struct BroadcastCipher {
  static constexpr std::string_view kMagic = "IBBC1";
  static constexpr std::size_t kWireSize =
      kMagic.size() + algebra::kG1Size + 2 * algebra::kG2Size;

  G1 c1;  // w^-k
  G2 c2;  // h^(k * prod(gamma + H(u)))
  G2 c3;  // h^(prod(gamma + H(u)))

  Bytes serialize() const;
  static BroadcastCipher deserialize(ByteView b);
  friend bool operator==(const BroadcastCipher&, const BroadcastCipher&) = default;
};

/// The session secret v^k.
struct BroadcastKey {
  GT bk;

  /// SHA-256 of the canonical GT encoding; keys the symmetric envelope of
  /// the group key.
  Key32 symmetric_key() const;
  friend bool operator==(const BroadcastKey&, const BroadcastKey&) = default;
};

struct Encapsulation {
  BroadcastKey key;
  BroadcastCipher cipher;
};

struct SetupResult {
  MasterKey master;
  PublicKey pub;
};

/// Generates the master secret and a public key for receiver sets of up to
/// `max_set_size` identities. Cost: O(n) G2 exponentiations.
SetupResult setup(const PairingCtx& ctx, std::size_t max_set_size,
                  crypto::Rng& rng);

UserKey extract_user_key(const MasterKey& mk, std::string_view user_id);

/// Public-key path: expands prod(X + H(u)) and folds it against h_powers.
Encapsulation encrypt_public(const PublicKey& pk,
                             std::span<const std::string> members,
                             const Scalar& k);

/// Master-key path: one running product, then two G2 exponentiations.
Encapsulation encrypt_master(const MasterKey& mk, const PublicKey& pk,
                             std::span<const std::string> members,
                             const Scalar& k);

/// Recovers v^k for `user_id` in `members`. A wrong key yields a wrong
/// value rather than an error; callers detect it through the envelope AEAD.
BroadcastKey decrypt(const PublicKey& pk, std::span<const std::string> members,
                     std::string_view user_id, const UserKey& uk,
                     const BroadcastCipher& c);

BroadcastCipher add_user_to_cipher(const MasterKey& mk,
                                   const BroadcastCipher& c,
                                   std::string_view user_id);

Encapsulation remove_user_from_cipher(const MasterKey& mk, const PublicKey& pk,
                                      const BroadcastCipher& c,
                                      std::string_view user_id,
                                      const Scalar& k_new);

/// Needs only public material: C3 is untouched.
Encapsulation rekey_cipher(const PublicKey& pk, const BroadcastCipher& c,
                           const Scalar& k_new);

}  // namespace ibbesgx::ibbe
