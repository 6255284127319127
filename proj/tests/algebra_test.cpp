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

#include <gtest/gtest.h>

#include <set>
#include <string>

#include "ibbesgx/error.hpp"
#include "ibbesgx/op_counts.hpp"

namespace ibbesgx::algebra {
namespace {

std::vector<Scalar> small(std::initializer_list<std::uint64_t> vs) {
  std::vector<Scalar> out;
  for (auto v : vs) out.push_back(Scalar::from_u64(v));
  return out;
}

class AlgebraTest : public ::testing::Test {
 protected:
  PairingCtx ctx;
  crypto::Rng rng = crypto::Rng::seeded(2024);
};

TEST_F(AlgebraTest, ScalarFieldArithmetic) {
  const Scalar a = Scalar::random(rng);
  const Scalar b = Scalar::random(rng);
  EXPECT_EQ(a + b - b, a);
  EXPECT_EQ(a * a.inverse(), Scalar::one());
  EXPECT_EQ(a + (-a), Scalar::zero());
  EXPECT_EQ(Scalar::from_u64(6), Scalar::from_u64(2) * Scalar::from_u64(3));
  EXPECT_THROW(Scalar::zero().inverse(), Error);
}

TEST_F(AlgebraTest, ScalarEncodingIsCanonical) {
  for (int i = 0; i < 50; ++i) {
    const Scalar s = Scalar::random(rng);
    const auto enc = s.to_bytes();
    EXPECT_EQ(Scalar::from_bytes(enc), s);
  }
  // p itself is not a canonical encoding; p - 1 is.
  auto order = PairingCtx::order();
  EXPECT_THROW(Scalar::from_bytes(order), Error);
  order.back() -= 1;
  EXPECT_EQ(Scalar::from_bytes(order), -Scalar::one());
  EXPECT_EQ(hex(Scalar::from_u64(258).to_bytes()),
            std::string(60, '0') + "0102");
}

TEST_F(AlgebraTest, HashToScalarDeterministicAndDistinct) {
  const Scalar alice = hash_to_scalar("alice");
  EXPECT_EQ(alice, hash_to_scalar("alice"));
  EXPECT_NE(alice, hash_to_scalar("bob"));
  EXPECT_FALSE(alice.is_zero());
  EXPECT_THROW(hash_to_scalar(std::string_view{}), Error);
}

TEST_F(AlgebraTest, HashToScalarNeverZeroOverMillionInputs) {
  std::uint64_t zeros = 0;
  for (std::uint32_t i = 0; i < 1'000'000; ++i) {
    ByteWriter w;
    w.u32(i);
    if (hash_to_scalar(w.bytes()).is_zero()) ++zeros;
  }
  EXPECT_EQ(zeros, 0u);
}

TEST_F(AlgebraTest, ExpandLinearFactorsSmallCases) {
  EXPECT_EQ(expand_linear_factors({}).coeffs, small({1}));
  EXPECT_EQ(expand_linear_factors(small({2, 3})).coeffs, small({6, 5, 1}));
  EXPECT_EQ(expand_linear_factors(small({1, 1, 1})).coeffs, small({1, 3, 3, 1}));
}

// Brute-force oracle: evaluate the product of linear factors directly.
Scalar product_at(std::span<const Scalar> roots, const Scalar& x) {
  Scalar acc = Scalar::one();
  for (const auto& r : roots) acc *= (x + r);
  return acc;
}

TEST_F(AlgebraTest, ExpandLinearFactorsMatchesDirectProduct) {
  for (std::size_t n : {1u, 2u, 7u, 33u}) {
    std::vector<Scalar> roots;
    for (std::size_t i = 0; i < n; ++i) roots.push_back(Scalar::random(rng));
    const Poly p = expand_linear_factors(roots);
    ASSERT_EQ(p.degree(), n);
    EXPECT_EQ(p.coeffs.back(), Scalar::one());
    for (int trial = 0; trial < 100; ++trial) {
      const Scalar x = Scalar::random(rng);
      ASSERT_EQ(p.evaluate(x), product_at(roots, x));
    }
  }
}

TEST_F(AlgebraTest, ExpansionCostIsQuadratic) {
  std::vector<Scalar> roots(40, Scalar::from_u64(5));
  CountScope scope;
  expand_linear_factors(roots);
  // Root i multiplies a degree-i polynomial: i + 1 products, i sums.
  EXPECT_EQ(scope.delta().scalar_mul, 40u * 41u / 2u);
  EXPECT_EQ(scope.delta().scalar_add, 40u * 39u / 2u);
}

TEST_F(AlgebraTest, ExponentiationEdgeCases) {
  EXPECT_TRUE(exp_g1(ctx.g(), Scalar::zero()).is_identity());
  EXPECT_EQ(exp_g1(ctx.g(), Scalar::one()), ctx.g());
  EXPECT_EQ(exp_g2(ctx.h(), Scalar::one()), ctx.h());
  EXPECT_TRUE(exp_gt(ctx.gt(), Scalar::zero()).is_one());
  EXPECT_EQ(exp_gt(ctx.gt(), Scalar::one()), ctx.gt());
  EXPECT_EQ(exp_g1(ctx.g(), Scalar::from_u64(2)), ctx.g() * ctx.g());
  EXPECT_EQ(exp_gt(ctx.gt(), Scalar::from_u64(3)), ctx.gt() * ctx.gt() * ctx.gt());
  // Exponents wrap modulo the group order.
  EXPECT_EQ(exp_g1(ctx.g(), -Scalar::one()), ctx.g().inverse());
  EXPECT_TRUE((exp_gt(ctx.gt(), -Scalar::one()) * ctx.gt()).is_one());
}

TEST_F(AlgebraTest, ExponentsCompose) {
  const Scalar a = Scalar::random(rng);
  const Scalar b = Scalar::random(rng);
  EXPECT_EQ(exp_g2(exp_g2(ctx.h(), a), b), exp_g2(ctx.h(), a * b));
  EXPECT_EQ(exp_gt(ctx.gt(), a) * exp_gt(ctx.gt(), b), exp_gt(ctx.gt(), a + b));
}

TEST_F(AlgebraTest, PairingIsBilinear) {
  const Scalar two = Scalar::from_u64(2);
  EXPECT_EQ(pairing(ctx.g(), ctx.h()), ctx.gt());
  EXPECT_EQ(pairing(exp_g1(ctx.g(), two), ctx.h()), pairing(ctx.g(), exp_g2(ctx.h(), two)));
  for (int i = 0; i < 3; ++i) {
    const Scalar a = Scalar::random(rng);
    const Scalar b = Scalar::random(rng);
    EXPECT_EQ(pairing(exp_g1(ctx.g(), a), exp_g2(ctx.h(), b)), exp_gt(ctx.gt(), a * b));
  }
  EXPECT_FALSE(ctx.gt().is_one());
  EXPECT_TRUE(pairing(G1::identity(), ctx.h()).is_one());
}

TEST_F(AlgebraTest, MultiExpMatchesFold) {
  const Scalar a = Scalar::random(rng);
  const Scalar b = Scalar::random(rng);
  const std::vector<G2> hh = {ctx.h(), ctx.h()};
  const std::vector<Scalar> ab = {a, b};
  EXPECT_EQ(multi_exp_g2(hh, ab), exp_g2(ctx.h(), a + b));

  for (std::size_t n : {0u, 1u, 3u, 4u, 17u, 64u}) {
    std::vector<G2> bases;
    std::vector<Scalar> exps;
    G2 fold;
    for (std::size_t i = 0; i < n; ++i) {
      bases.push_back(exp_g2(ctx.h(), Scalar::random(rng)));
      exps.push_back(i == 2 ? Scalar::zero() : Scalar::random(rng));
      fold *= exp_g2(bases.back(), exps.back());
    }
    if (n > 5) bases[5] = G2::identity();
    if (n > 5) {
      fold = G2();
      for (std::size_t i = 0; i < n; ++i) fold *= exp_g2(bases[i], exps[i]);
    }
    EXPECT_EQ(multi_exp_g2(bases, exps), fold) << "n=" << n;
  }
  const std::vector<Scalar> one_exp = {a};
  EXPECT_THROW(multi_exp_g2(hh, one_exp), Error);
}

TEST_F(AlgebraTest, SerializationRoundTrips) {
  for (int i = 0; i < 10; ++i) {
    const Scalar e = Scalar::random(rng);
    const G1 p = exp_g1(ctx.g(), e);
    const G2 q = exp_g2(ctx.h(), e);
    const GT t = exp_gt(ctx.gt(), e);
    EXPECT_EQ(G1::from_bytes(p.to_bytes()), p);
    EXPECT_EQ(G2::from_bytes(q.to_bytes()), q);
    EXPECT_EQ(GT::from_bytes(t.to_bytes()), t);
    EXPECT_EQ(G1::from_bytes(p.to_bytes()).to_bytes(), p.to_bytes());
  }
  EXPECT_TRUE(G1::from_bytes(G1::identity().to_bytes()).is_identity());
  EXPECT_TRUE(G2::from_bytes(G2::identity().to_bytes()).is_identity());
  EXPECT_TRUE(GT::from_bytes(GT::one().to_bytes()).is_one());
  EXPECT_EQ(G1().to_bytes().size(), kG1Size);
  EXPECT_EQ(G2().to_bytes().size(), kG2Size);
  EXPECT_EQ(GT().to_bytes().size(), kGtSize);
}

TEST_F(AlgebraTest, InvalidEncodingsAreRejected) {
  auto g = ctx.g().to_bytes();
  g[47] ^= 0x01;  // almost surely off the curve
  EXPECT_THROW(G1::from_bytes(g), Error);
  EXPECT_THROW(G1::from_bytes(Bytes(47, 0)), Error);
  auto h = ctx.h().to_bytes();
  h[95] ^= 0x01;
  EXPECT_THROW(G2::from_bytes(h), Error);
  auto t = ctx.gt().to_bytes();
  t[575] ^= 0x01;
  try {
    GT::from_bytes(t);
    FAIL() << "tampered GT accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidElement);
  }
  Bytes all_ff(kGtSize, 0xff);
  EXPECT_THROW(GT::from_bytes(all_ff), Error);
}

TEST_F(AlgebraTest, CountersReportExactWork) {
  CountScope scope;
  const Scalar e = Scalar::from_u64(9);
  for (int i = 0; i < 5; ++i) exp_g2(ctx.h(), e);
  exp_g1(ctx.g(), e);
  exp_gt(ctx.gt(), e);
  pairing(ctx.g(), ctx.h());
  const OpCounts d = scope.delta();
  EXPECT_EQ(d.g2_exp, 5u);
  EXPECT_EQ(d.g1_exp, 1u);
  EXPECT_EQ(d.gt_exp, 1u);
  EXPECT_EQ(d.pairings, 1u);
  EXPECT_EQ(d.g2_multi_exp, 0u);
}

}  // namespace
}  // namespace ibbesgx::algebra
