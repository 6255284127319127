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

// Pairing-group abstraction over BLS12-381 (type-3, ~128-bit security).
//
// Groups are written multiplicatively to match the scheme's notation:
// operator* is the group law and exp_* raise an element to a scalar power.
// Every exponentiation, pairing and scalar-field operation bumps the
// per-thread OpCounts so that complexity can be asserted as exact counts.

#include <blst.h>

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "ibbesgx/bytes.hpp"
#include "ibbesgx/crypto.hpp"

namespace ibbesgx::algebra {

class G1;
class G2;
class GT;

inline constexpr std::size_t kScalarSize = 32;
inline constexpr std::size_t kG1Size = 48;
inline constexpr std::size_t kG2Size = 96;
inline constexpr std::size_t kGtSize = 576;

/// Element of the scalar field Z_p, p the prime order of the pairing groups.
class Scalar {
 public:
  using Encoding = std::array<std::uint8_t, kScalarSize>;

  Scalar() : v_{} {}

  static Scalar zero() { return Scalar(); }
  static Scalar one() { return from_u64(1); }
  static Scalar from_u64(std::uint64_t v);
  /// Uniform over Z_p^* (never zero).
  static Scalar random(crypto::Rng& rng);
  /// Canonical 32-byte big-endian encoding; values >= p are rejected.
  static Scalar from_bytes(ByteView be);
  /// Reduces an arbitrary-length big-endian integer modulo p.
  static Scalar reduce(ByteView be);

  Encoding to_bytes() const;
  bool is_zero() const;
  /// Multiplicative inverse; throws ErrorCode::kDegenerate on zero.
  Scalar inverse() const;

  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend bool operator==(const Scalar& a, const Scalar& b);

 private:
  friend G1 exp_g1(const G1&, const Scalar&);
  friend G2 exp_g2(const G2&, const Scalar&);
  friend GT exp_gt(const GT&, const Scalar&);
  friend G2 multi_exp_g2(std::span<const G2>, std::span<const Scalar>);
  // Little-endian canonical bytes, the form blst multiplies by.
  blst_scalar exponent() const;

  blst_fr v_;
};

class G1 {
 public:
  using Encoding = std::array<std::uint8_t, kG1Size>;

  G1();  // identity
  static G1 identity() { return G1(); }
  static G1 generator();
  /// Compressed encoding; rejects off-curve and out-of-subgroup points.
  static G1 from_bytes(ByteView b);

  Encoding to_bytes() const;
  bool is_identity() const;
  G1 inverse() const;
  G1& operator*=(const G1& o);
  friend G1 operator*(G1 a, const G1& b) { return a *= b; }
  friend bool operator==(const G1& a, const G1& b);

 private:
  friend G1 exp_g1(const G1&, const Scalar&);
  friend GT pairing(const G1&, const G2&);
  blst_p1 p_;
};

class G2 {
 public:
  using Encoding = std::array<std::uint8_t, kG2Size>;

  G2();  // identity
  static G2 identity() { return G2(); }
  static G2 generator();
  static G2 from_bytes(ByteView b);

  Encoding to_bytes() const;
  bool is_identity() const;
  G2 inverse() const;
  G2& operator*=(const G2& o);
  friend G2 operator*(G2 a, const G2& b) { return a *= b; }
  friend bool operator==(const G2& a, const G2& b);

 private:
  friend G2 exp_g2(const G2&, const Scalar&);
  friend G2 multi_exp_g2(std::span<const G2>, std::span<const Scalar>);
  friend GT pairing(const G1&, const G2&);
  blst_p2 p_;
};

class GT {
 public:
  using Encoding = std::array<std::uint8_t, kGtSize>;

  GT();  // one
  static GT one() { return GT(); }
  /// Twelve 48-byte big-endian base-field coordinates; rejects
  /// non-canonical coordinates and elements outside the order-p subgroup.
  static GT from_bytes(ByteView b);

  Encoding to_bytes() const;
  bool is_one() const;
  GT inverse() const;
  GT& operator*=(const GT& o);
  friend GT operator*(GT a, const GT& b) { return a *= b; }
  friend bool operator==(const GT& a, const GT& b);

 private:
  friend GT exp_gt(const GT&, const Scalar&);
  friend GT pairing(const G1&, const G2&);
  blst_fp12 f_;
};

G1 exp_g1(const G1& base, const Scalar& e);
G2 exp_g2(const G2& base, const Scalar& e);
GT exp_gt(const GT& base, const Scalar& e);
/// prod_i bases[i]^exps[i]. Throws ErrorCode::kInvalidArgument on a length
/// mismatch. Counted as one multi-exp call plus one term per base.
G2 multi_exp_g2(std::span<const G2> bases, std::span<const Scalar> exps);
GT pairing(const G1& a, const G2& b);

/// Hash an identity into Z_p^*: SHA-512 reduced mod p, re-hashed with a
/// one-byte counter suffix in the (negligible) event the result is zero.
Scalar hash_to_scalar(ByteView id);
inline Scalar hash_to_scalar(std::string_view id) {
  return hash_to_scalar(as_bytes(id));
}

/// Coefficients in ascending order: coeffs[t] multiplies X^t.
struct Poly {
  std::vector<Scalar> coeffs;

  std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  Scalar evaluate(const Scalar& x) const;
};

/// prod_i (X + roots[i]). coeffs[t] is the (N - t)-th elementary symmetric
/// polynomial of the roots; the leading coefficient is one.
Poly expand_linear_factors(std::span<const Scalar> roots);

/// Fixed generators and curve identity. Immutable once built, so one
/// instance can be shared freely between threads.
class PairingCtx {
 public:
  PairingCtx();

  std::string_view curve() const { return "BLS12-381"; }
  const G1& g() const { return g_; }
  const G2& h() const { return h_; }
  /// e(g, h).
  const GT& gt() const { return gt_; }
  static Scalar::Encoding order();

 private:
  G1 g_;
  G2 h_;
  GT gt_;
};

}  // namespace ibbesgx::algebra
