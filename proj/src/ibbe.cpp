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

#include "ibbesgx/ibbe.hpp"

#include <algorithm>
#include <unordered_set>

#include "ibbesgx/error.hpp"

namespace ibbesgx::ibbe {

using algebra::exp_g1;
using algebra::exp_g2;
using algebra::exp_gt;
using algebra::hash_to_scalar;

namespace {

constexpr std::string_view kPublicKeyMagic = "IBPK1";
constexpr std::string_view kUserKeyMagic = "IBUK1";
constexpr std::string_view kMasterKeyMagic = "IBMK1";

// Hashes the receiver set, rejecting empty, oversized and duplicate sets.
std::vector<Scalar> hash_members(const PublicKey& pk,
                                 std::span<const std::string> members) {
  if (members.empty())
    fail(ErrorCode::kInvalidArgument, "receiver set must not be empty");
  if (members.size() > pk.max_set_size())
    fail(ErrorCode::kCapacity,
         "receiver set of " + std::to_string(members.size()) +
             " exceeds public key capacity " +
             std::to_string(pk.max_set_size()));
  std::unordered_set<std::string_view> seen;
  std::vector<Scalar> hashes;
  hashes.reserve(members.size());
  for (const auto& m : members) {
    if (!seen.insert(m).second)
      fail(ErrorCode::kDuplicate, "duplicate receiver: " + m);
    hashes.push_back(hash_to_scalar(m));
  }
  // Distinct ids with equal hashes would make decryption ill-defined.
  std::vector<Scalar::Encoding> encoded;
  encoded.reserve(hashes.size());
  for (const auto& h : hashes) encoded.push_back(h.to_bytes());
  std::sort(encoded.begin(), encoded.end());
  if (std::adjacent_find(encoded.begin(), encoded.end()) != encoded.end())
    fail(ErrorCode::kDegenerate, "identity hash collision in receiver set");
  return hashes;
}

Scalar identity_exponent(const MasterKey& mk, std::string_view user_id) {
  Scalar e = mk.gamma + hash_to_scalar(user_id);
  if (e.is_zero()) fail(ErrorCode::kDegenerate, "gamma + H(u) is zero");
  return e;
}

Encapsulation finish(const PublicKey& pk, const G2& c3, const Scalar& k) {
  Encapsulation out;
  out.cipher.c1 = exp_g1(pk.w, -k);
  out.cipher.c3 = c3;
  out.cipher.c2 = exp_g2(c3, k);
  out.key.bk = exp_gt(pk.v, k);
  return out;
}

void require_session_scalar(const Scalar& k) {
  if (k.is_zero()) fail(ErrorCode::kInvalidArgument, "session scalar must be non-zero");
}

}  // namespace

Bytes MasterKey::serialize() const {
  ByteWriter w;
  w.raw(kMasterKeyMagic).raw(g.to_bytes()).raw(gamma.to_bytes());
  return std::move(w).take();
}

MasterKey MasterKey::deserialize(ByteView b) {
  ByteReader r(b);
  r.expect(kMasterKeyMagic);
  MasterKey mk;
  mk.g = G1::from_bytes(r.raw(algebra::kG1Size));
  mk.gamma = Scalar::from_bytes(r.raw(algebra::kScalarSize));
  r.expect_done();
  return mk;
}

Bytes PublicKey::serialize() const {
  ByteWriter out;
  out.raw(kPublicKeyMagic).u32(static_cast<std::uint32_t>(max_set_size()));
  out.raw(w.to_bytes()).raw(v.to_bytes());
  for (const auto& hp : h_powers) out.raw(hp.to_bytes());
  return std::move(out).take();
}

PublicKey PublicKey::deserialize(ByteView b) {
  ByteReader r(b);
  r.expect(kPublicKeyMagic);
  const std::uint32_t n = r.u32();
  if (n == 0) fail(ErrorCode::kParse, "public key capacity must be >= 1");
  if (r.remaining() != algebra::kG1Size + algebra::kGtSize +
                           (static_cast<std::size_t>(n) + 1) * algebra::kG2Size)
    fail(ErrorCode::kParse, "public key length does not match its capacity");
  PublicKey pk;
  pk.w = G1::from_bytes(r.raw(algebra::kG1Size));
  pk.v = GT::from_bytes(r.raw(algebra::kGtSize));
  pk.h_powers.reserve(n + 1);
  for (std::uint32_t i = 0; i <= n; ++i)
    pk.h_powers.push_back(G2::from_bytes(r.raw(algebra::kG2Size)));
  return pk;
}

Bytes UserKey::serialize() const {
  ByteWriter w;
  w.raw(kUserKeyMagic).lp(user_id).raw(sk.to_bytes());
  return std::move(w).take();
}

UserKey UserKey::deserialize(ByteView b) {
  ByteReader r(b);
  r.expect(kUserKeyMagic);
  UserKey uk;
  uk.user_id = r.lp_string();
  uk.sk = G1::from_bytes(r.raw(algebra::kG1Size));
  r.expect_done();
  return uk;
}

Bytes BroadcastCipher::serialize() const {
  ByteWriter w;
  w.raw(kMagic).raw(c1.to_bytes()).raw(c2.to_bytes()).raw(c3.to_bytes());
  return std::move(w).take();
}

BroadcastCipher BroadcastCipher::deserialize(ByteView b) {
  if (b.size() != kWireSize)
    fail(ErrorCode::kParse, "broadcast cipher must be " +
                                std::to_string(kWireSize) + " bytes");
  ByteReader r(b);
  r.expect(kMagic);
  BroadcastCipher c;
  c.c1 = G1::from_bytes(r.raw(algebra::kG1Size));
  c.c2 = G2::from_bytes(r.raw(algebra::kG2Size));
  c.c3 = G2::from_bytes(r.raw(algebra::kG2Size));
  return c;
}

Key32 BroadcastKey::symmetric_key() const {
  const auto enc = bk.to_bytes();
  return crypto::sha256(enc);
}

SetupResult setup(const PairingCtx& ctx, std::size_t max_set_size,
                  crypto::Rng& rng) {
  if (max_set_size == 0)
    fail(ErrorCode::kInvalidArgument, "maximum receiver-set size must be >= 1");
  SetupResult out;
  out.master.g = exp_g1(ctx.g(), Scalar::random(rng));
  out.master.gamma = Scalar::random(rng);
  const G2 h = exp_g2(ctx.h(), Scalar::random(rng));

  out.pub.w = exp_g1(out.master.g, out.master.gamma);
  out.pub.v = algebra::pairing(out.master.g, h);
  out.pub.h_powers.reserve(max_set_size + 1);
  out.pub.h_powers.push_back(h);
  for (std::size_t i = 1; i <= max_set_size; ++i)
    out.pub.h_powers.push_back(exp_g2(out.pub.h_powers.back(), out.master.gamma));
  return out;
}

UserKey extract_user_key(const MasterKey& mk, std::string_view user_id) {
  const Scalar e = identity_exponent(mk, user_id);
  return UserKey{std::string(user_id), exp_g1(mk.g, e.inverse())};
}

Encapsulation encrypt_public(const PublicKey& pk,
                             std::span<const std::string> members,
                             const Scalar& k) {
  require_session_scalar(k);
  const auto hashes = hash_members(pk, members);
  // prod(gamma + H(u)) = sum_t coeffs[t] gamma^t, evaluated in the exponent.
  const algebra::Poly poly = algebra::expand_linear_factors(hashes);
  const std::span<const G2> powers(pk.h_powers.data(), poly.coeffs.size());
  return finish(pk, algebra::multi_exp_g2(powers, poly.coeffs), k);
}

Encapsulation encrypt_master(const MasterKey& mk, const PublicKey& pk,
                             std::span<const std::string> members,
                             const Scalar& k) {
  require_session_scalar(k);
  const auto hashes = hash_members(pk, members);
  Scalar product = Scalar::one();
  for (const auto& h : hashes) product *= (mk.gamma + h);
  if (product.is_zero()) fail(ErrorCode::kDegenerate, "gamma + H(u) is zero");
  return finish(pk, exp_g2(pk.h(), product), k);
}

BroadcastKey decrypt(const PublicKey& pk, std::span<const std::string> members,
                     std::string_view user_id, const UserKey& uk,
                     const BroadcastCipher& c) {
  if (uk.user_id != user_id)
    fail(ErrorCode::kInvalidArgument, "user key does not belong to " +
                                          std::string(user_id));
  const auto self = std::find(members.begin(), members.end(), user_id);
  if (self == members.end())
    fail(ErrorCode::kNotMember, std::string(user_id) + " is not in the receiver set");
  if (members.size() > pk.max_set_size())
    fail(ErrorCode::kCapacity, "receiver set exceeds public key capacity");

  std::vector<Scalar> others;
  others.reserve(members.size() - 1);
  for (auto it = members.begin(); it != members.end(); ++it)
    if (it != self) others.push_back(hash_to_scalar(*it));

  // prod_{j != i}(X + H(u_j)) = delta + X * q(X); h^q(gamma) from the powers.
  const algebra::Poly poly = algebra::expand_linear_factors(others);
  const Scalar& delta = poly.coeffs.front();
  const std::span<const Scalar> upper(poly.coeffs.begin() + 1, poly.coeffs.end());
  const std::span<const G2> powers(pk.h_powers.data(), upper.size());
  const G2 h_q = algebra::multi_exp_g2(powers, upper);

  // e(c1, h^q) * e(sk, c2) = v^(k * delta)
  const GT blinded = algebra::pairing(c.c1, h_q) * algebra::pairing(uk.sk, c.c2);
  return BroadcastKey{exp_gt(blinded, delta.inverse())};
}

BroadcastCipher add_user_to_cipher(const MasterKey& mk,
                                   const BroadcastCipher& c,
                                   std::string_view user_id) {
  const Scalar e = identity_exponent(mk, user_id);
  return BroadcastCipher{c.c1, exp_g2(c.c2, e), exp_g2(c.c3, e)};
}

Encapsulation remove_user_from_cipher(const MasterKey& mk, const PublicKey& pk,
                                      const BroadcastCipher& c,
                                      std::string_view user_id,
                                      const Scalar& k_new) {
  require_session_scalar(k_new);
  const Scalar e = identity_exponent(mk, user_id);
  return finish(pk, exp_g2(c.c3, e.inverse()), k_new);
}

Encapsulation rekey_cipher(const PublicKey& pk, const BroadcastCipher& c,
                           const Scalar& k_new) {
  require_session_scalar(k_new);
  return finish(pk, c.c3, k_new);
}

}  // namespace ibbesgx::ibbe
