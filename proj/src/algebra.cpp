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

#include "ibbesgx/algebra.hpp"

#include <algorithm>
#include <cstring>

#include "ibbesgx/error.hpp"
#include "ibbesgx/op_counts.hpp"

namespace ibbesgx::algebra {
namespace {

constexpr std::size_t kExponentBits = 255;
constexpr std::size_t kFpSize = 48;

// Below this many terms a plain fold beats Pippenger's bucket setup.
constexpr std::size_t kPippengerThreshold = 4;

blst_fp& fp12_coord(blst_fp12& f, std::size_t i) {
  return f.fp6[i / 6].fp2[(i / 2) % 3].fp[i % 2];
}

const blst_fp& fp12_coord(const blst_fp12& f, std::size_t i) {
  return f.fp6[i / 6].fp2[(i / 2) % 3].fp[i % 2];
}

void require_size(ByteView b, std::size_t n, const char* what) {
  if (b.size() != n)
    fail(ErrorCode::kInvalidElement,
         std::string(what) + ": expected " + std::to_string(n) + " bytes, got " +
             std::to_string(b.size()));
}

}  // namespace

// ---------------------------------------------------------------- Scalar

Scalar Scalar::from_u64(std::uint64_t v) {
  const std::uint64_t limbs[4] = {v, 0, 0, 0};
  Scalar s;
  blst_fr_from_uint64(&s.v_, limbs);
  return s;
}

Scalar Scalar::random(crypto::Rng& rng) {
  for (;;) {
    std::array<std::uint8_t, 64> wide;
    rng.fill(wide);
    Scalar s = reduce(wide);
    secure_zero(wide);
    if (!s.is_zero()) return s;
  }
}

Scalar Scalar::from_bytes(ByteView be) {
  if (be.size() != kScalarSize)
    fail(ErrorCode::kParse, "scalar encoding must be 32 bytes");
  blst_scalar raw;
  blst_scalar_from_bendian(&raw, be.data());
  if (!blst_scalar_fr_check(&raw))
    fail(ErrorCode::kParse, "scalar encoding is not reduced modulo p");
  Scalar s;
  blst_fr_from_scalar(&s.v_, &raw);
  return s;
}

Scalar Scalar::reduce(ByteView be) {
  blst_scalar raw;
  blst_scalar_from_be_bytes(&raw, be.data(), be.size());
  Scalar s;
  blst_fr_from_scalar(&s.v_, &raw);
  return s;
}

Scalar::Encoding Scalar::to_bytes() const {
  blst_scalar raw;
  blst_scalar_from_fr(&raw, &v_);
  Encoding out;
  blst_bendian_from_scalar(out.data(), &raw);
  return out;
}

blst_scalar Scalar::exponent() const {
  blst_scalar raw;
  blst_scalar_from_fr(&raw, &v_);
  return raw;
}

bool Scalar::is_zero() const {
  return std::all_of(std::begin(v_.l), std::end(v_.l),
                     [](limb_t l) { return l == 0; });
}

Scalar Scalar::inverse() const {
  if (is_zero()) fail(ErrorCode::kDegenerate, "inverse of zero scalar");
  ++counters::local().scalar_inv;
  Scalar out;
  blst_fr_eucl_inverse(&out.v_, &v_);
  return out;
}

Scalar Scalar::operator-() const {
  ++counters::local().scalar_add;
  Scalar out;
  blst_fr_cneg(&out.v_, &v_, true);
  return out;
}

Scalar& Scalar::operator+=(const Scalar& o) {
  ++counters::local().scalar_add;
  blst_fr_add(&v_, &v_, &o.v_);
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  ++counters::local().scalar_add;
  blst_fr_sub(&v_, &v_, &o.v_);
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  ++counters::local().scalar_mul;
  blst_fr_mul(&v_, &v_, &o.v_);
  return *this;
}

bool operator==(const Scalar& a, const Scalar& b) {
  return std::memcmp(&a.v_, &b.v_, sizeof(a.v_)) == 0;
}

// ---------------------------------------------------------------- G1

G1::G1() { std::memset(&p_, 0, sizeof(p_)); }

G1 G1::generator() {
  G1 out;
  out.p_ = *blst_p1_generator();
  return out;
}

G1 G1::from_bytes(ByteView b) {
  require_size(b, kG1Size, "G1");
  blst_p1_affine aff;
  if (blst_p1_uncompress(&aff, b.data()) != BLST_SUCCESS)
    fail(ErrorCode::kInvalidElement, "G1 point does not decode");
  if (!blst_p1_affine_in_g1(&aff))
    fail(ErrorCode::kInvalidElement, "G1 point outside prime-order subgroup");
  G1 out;
  blst_p1_from_affine(&out.p_, &aff);
  return out;
}

G1::Encoding G1::to_bytes() const {
  Encoding out;
  blst_p1_compress(out.data(), &p_);
  return out;
}

bool G1::is_identity() const { return blst_p1_is_inf(&p_); }

G1 G1::inverse() const {
  G1 out = *this;
  blst_p1_cneg(&out.p_, true);
  return out;
}

G1& G1::operator*=(const G1& o) {
  blst_p1_add_or_double(&p_, &p_, &o.p_);
  return *this;
}

bool operator==(const G1& a, const G1& b) {
  return blst_p1_is_equal(&a.p_, &b.p_);
}

// ---------------------------------------------------------------- G2

G2::G2() { std::memset(&p_, 0, sizeof(p_)); }

G2 G2::generator() {
  G2 out;
  out.p_ = *blst_p2_generator();
  return out;
}

G2 G2::from_bytes(ByteView b) {
  require_size(b, kG2Size, "G2");
  blst_p2_affine aff;
  if (blst_p2_uncompress(&aff, b.data()) != BLST_SUCCESS)
    fail(ErrorCode::kInvalidElement, "G2 point does not decode");
  if (!blst_p2_affine_in_g2(&aff))
    fail(ErrorCode::kInvalidElement, "G2 point outside prime-order subgroup");
  G2 out;
  blst_p2_from_affine(&out.p_, &aff);
  return out;
}

G2::Encoding G2::to_bytes() const {
  Encoding out;
  blst_p2_compress(out.data(), &p_);
  return out;
}

bool G2::is_identity() const { return blst_p2_is_inf(&p_); }

G2 G2::inverse() const {
  G2 out = *this;
  blst_p2_cneg(&out.p_, true);
  return out;
}

G2& G2::operator*=(const G2& o) {
  blst_p2_add_or_double(&p_, &p_, &o.p_);
  return *this;
}

bool operator==(const G2& a, const G2& b) {
  return blst_p2_is_equal(&a.p_, &b.p_);
}

// ---------------------------------------------------------------- GT

GT::GT() : f_(*blst_fp12_one()) {}

GT GT::from_bytes(ByteView b) {
  require_size(b, kGtSize, "GT");
  GT out;
  for (std::size_t i = 0; i < 12; ++i) {
    const std::uint8_t* chunk = b.data() + i * kFpSize;
    blst_fp& coord = fp12_coord(out.f_, i);
    blst_fp_from_bendian(&coord, chunk);
    std::array<std::uint8_t, kFpSize> back;
    blst_bendian_from_fp(back.data(), &coord);
    if (!std::equal(back.begin(), back.end(), chunk))
      fail(ErrorCode::kInvalidElement, "GT coordinate is not canonical");
  }
  if (!blst_fp12_in_group(&out.f_))
    fail(ErrorCode::kInvalidElement, "GT element outside prime-order subgroup");
  return out;
}

GT::Encoding GT::to_bytes() const {
  Encoding out;
  for (std::size_t i = 0; i < 12; ++i)
    blst_bendian_from_fp(out.data() + i * kFpSize, &fp12_coord(f_, i));
  return out;
}

bool GT::is_one() const { return blst_fp12_is_one(&f_); }

GT GT::inverse() const {
  // Pairing outputs are unitary, so conjugation inverts them.
  GT out = *this;
  blst_fp12_conjugate(&out.f_);
  return out;
}

GT& GT::operator*=(const GT& o) {
  blst_fp12_mul(&f_, &f_, &o.f_);
  return *this;
}

bool operator==(const GT& a, const GT& b) {
  return blst_fp12_is_equal(&a.f_, &b.f_);
}

// ---------------------------------------------------------------- exponentiation

G1 exp_g1(const G1& base, const Scalar& e) {
  ++counters::local().g1_exp;
  const blst_scalar k = e.exponent();
  G1 out;
  blst_p1_mult(&out.p_, &base.p_, k.b, kExponentBits);
  return out;
}

G2 exp_g2(const G2& base, const Scalar& e) {
  ++counters::local().g2_exp;
  const blst_scalar k = e.exponent();
  G2 out;
  blst_p2_mult(&out.p_, &base.p_, k.b, kExponentBits);
  return out;
}

GT exp_gt(const GT& base, const Scalar& e) {
  ++counters::local().gt_exp;
  const blst_scalar k = e.exponent();
  // Fixed 4-bit window; squarings stay in the cyclotomic subgroup.
  std::array<blst_fp12, 16> table;
  table[0] = *blst_fp12_one();
  for (std::size_t i = 1; i < table.size(); ++i)
    blst_fp12_mul(&table[i], &table[i - 1], &base.f_);

  GT out;
  bool started = false;
  for (int byte = kScalarSize - 1; byte >= 0; --byte) {
    for (int shift = 4; shift >= 0; shift -= 4) {
      const unsigned nibble = (k.b[byte] >> shift) & 0xf;
      if (started) {
        for (int s = 0; s < 4; ++s) blst_fp12_cyclotomic_sqr(&out.f_, &out.f_);
      }
      if (nibble != 0) {
        blst_fp12_mul(&out.f_, &out.f_, &table[nibble]);
        started = true;
      }
    }
  }
  return out;
}

G2 multi_exp_g2(std::span<const G2> bases, std::span<const Scalar> exps) {
  if (bases.size() != exps.size())
    fail(ErrorCode::kInvalidArgument, "multi_exp_g2: bases/exponents length mismatch");
  auto& c = counters::local();
  ++c.g2_multi_exp;
  c.g2_multi_exp_terms += bases.size();

  std::vector<const blst_p2*> points;
  std::vector<blst_scalar> scalars;
  points.reserve(bases.size());
  scalars.reserve(bases.size());
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (bases[i].is_identity() || exps[i].is_zero()) continue;
    points.push_back(&bases[i].p_);
    scalars.push_back(exps[i].exponent());
  }

  G2 out;
  if (points.size() < kPippengerThreshold) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      blst_p2 term;
      blst_p2_mult(&term, points[i], scalars[i].b, kExponentBits);
      blst_p2_add_or_double(&out.p_, &out.p_, &term);
    }
    return out;
  }

  std::vector<blst_p2_affine> affine(points.size());
  blst_p2s_to_affine(affine.data(), points.data(), points.size());
  std::vector<const blst_p2_affine*> affine_ptrs(points.size());
  std::vector<const byte*> scalar_ptrs(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    affine_ptrs[i] = &affine[i];
    scalar_ptrs[i] = scalars[i].b;
  }
  std::vector<limb_t> scratch(
      blst_p2s_mult_pippenger_scratch_sizeof(points.size()) / sizeof(limb_t) + 1);
  blst_p2s_mult_pippenger(&out.p_, affine_ptrs.data(), points.size(),
                          scalar_ptrs.data(), kExponentBits, scratch.data());
  return out;
}

GT pairing(const G1& a, const G2& b) {
  ++counters::local().pairings;
  if (a.is_identity() || b.is_identity()) return GT::one();
  blst_p1_affine pa;
  blst_p2_affine pb;
  blst_p1_to_affine(&pa, &a.p_);
  blst_p2_to_affine(&pb, &b.p_);
  GT out;
  blst_fp12 ml;
  blst_miller_loop(&ml, &pb, &pa);
  blst_final_exp(&out.f_, &ml);
  return out;
}

// ---------------------------------------------------------------- hashing

Scalar hash_to_scalar(ByteView id) {
  if (id.empty()) fail(ErrorCode::kInvalidArgument, "hash_to_scalar: empty id");
  ++counters::local().hash_to_scalar;
  Bytes buf(id.begin(), id.end());
  for (unsigned counter = 0;; ++counter) {
    if (counter > 0) {
      if (counter > 0xff) fail(ErrorCode::kDegenerate, "hash_to_scalar exhausted");
      if (counter == 1) buf.push_back(0);
      buf.back() = static_cast<std::uint8_t>(counter);
    }
    const auto wide = crypto::sha512(buf);
    Scalar s = Scalar::reduce(wide);
    if (!s.is_zero()) return s;
  }
}

// ---------------------------------------------------------------- polynomials

Scalar Poly::evaluate(const Scalar& x) const {
  Scalar acc;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc *= x;
    acc += *it;
  }
  return acc;
}

Poly expand_linear_factors(std::span<const Scalar> roots) {
  Poly p;
  p.coeffs.reserve(roots.size() + 1);
  p.coeffs.push_back(Scalar::one());
  for (const Scalar& r : roots) {
    // (sum c_t X^t)(X + r): the new top coefficient is the old leading one.
    p.coeffs.push_back(p.coeffs.back());
    for (std::size_t t = p.coeffs.size() - 2; t >= 1; --t)
      p.coeffs[t] = p.coeffs[t - 1] + r * p.coeffs[t];
    p.coeffs[0] *= r;
  }
  return p;
}

// ---------------------------------------------------------------- context

PairingCtx::PairingCtx()
    : g_(G1::generator()), h_(G2::generator()), gt_(pairing(g_, h_)) {}

Scalar::Encoding PairingCtx::order() {
  // r = 0x73eda753...00000001
  static constexpr Scalar::Encoding kOrder = {
      0x73, 0xed, 0xa7, 0x53, 0x29, 0x9d, 0x7d, 0x48, 0x33, 0x39, 0xd8,
      0x08, 0x09, 0xa1, 0xd8, 0x05, 0x53, 0xbd, 0xa4, 0x02, 0xff, 0xfe,
      0x5b, 0xfe, 0xff, 0xff, 0xff, 0xff, 0x00, 0x00, 0x00, 0x01};
  return kOrder;
}

}  // namespace ibbesgx::algebra
