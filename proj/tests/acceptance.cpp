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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "enclave_access.hpp"
#include "ibbesgx/asky.hpp"
#include "ibbesgx/bench.hpp"
#include "ibbesgx/enclave.hpp"
#include "ibbesgx/error.hpp"
#include "ibbesgx/groups.hpp"
#include "ibbesgx/hybrid.hpp"
#include "ibbesgx/ibbe.hpp"
#include "ibbesgx/op_counts.hpp"
#include "ibbesgx/store.hpp"
#include "ibbesgx/trace.hpp"
#include "test_util.hpp"

namespace {

using namespace ibbesgx;
using enclave::Enclave;
using TA = enclave::EnclaveTestAccess;
using Clock = std::chrono::steady_clock;

// Thrown by check() with the failing condition.
struct CriterionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw CriterionFailure(what);
}

std::ostream& operator<<(std::ostream& os, ErrorCode c) { return os << ibbesgx::to_string(c); }

template <class A, class B>
void check_eq(const A& a, const B& b, const std::string& what) {
  if (!(a == b)) {
    std::ostringstream os;
    os << what << ": " << a << " != " << b;
    throw CriterionFailure(os.str());
  }
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  throw CriterionFailure("expected an error, got none");
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

const algebra::PairingCtx& ctx() {
  static const algebra::PairingCtx c;
  return c;
}

std::vector<std::string> ids(std::size_t n, const std::string& prefix = "m") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

Bytes bytes_of(std::span<const std::uint8_t> s) { return {s.begin(), s.end()}; }

// 1. Cross-path oracle.
std::string criterion_1() {
  const auto t0 = Clock::now();
  auto rng = crypto::Rng::seeded(101);
  const auto keys = ibbe::setup(ctx(), 64, rng);
  const int trials = 200;
  for (int i = 0; i < trials; ++i) {
    const std::size_t size = 1 + rng.uniform(64);
    const auto s = ids(size, "c1-" + std::to_string(i) + "-");
    const auto k = algebra::Scalar::random(rng);
    const auto pub = ibbe::encrypt_public(keys.pub, s, k);
    const auto mas = ibbe::encrypt_master(keys.master, keys.pub, s, k);
    check(pub.cipher == mas.cipher, "cipher mismatch at trial " + std::to_string(i));
    check(pub.key == mas.key, "key mismatch at trial " + std::to_string(i));
  }
  const double secs = seconds_since(t0);
  check(secs < 60.0, "took " + std::to_string(secs) + " s");
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d random sets, n=64, %.1f s", trials, secs);
  return buf;
}

// 2. Round-trip over group and partition sizes, with revocation.
std::string criterion_2() {
  const auto t0 = Clock::now();
  Enclave e(ctx(), 100, crypto::Rng::seeded(202));
  const auto& pk = e.public_key();
  std::size_t derivations = 0;
  std::size_t rejections = 0;

  auto expect_rejected = [&](const groups::GroupState& gs, const std::string& user) {
    const ibbe::UserKey uk = e.extract_user_key(user);
    for (const auto& p : gs.partitions) {
      check_eq(code_of([&] { groups::derive_group_key(pk, p, user, uk); }),
               ErrorCode::kAuthentication, "unlisted " + user);
      groups::Partition forged = p;
      if (forged.members.size() < pk.max_set_size())
        forged.members.push_back(user);
      else
        forged.members.back() = user;
      check_eq(code_of([&] { groups::derive_group_key(pk, forged, user, uk); }),
               ErrorCode::kAuthentication, "self-listed " + user);
      rejections += 2;
    }
  };
  auto expect_all_derive = [&](const groups::GroupState& gs) {
    const Key32 gk = TA::gk(e, gs.sealed_gk);
    for (const auto& p : gs.partitions)
      for (const auto& m : p.members) {
        check(groups::derive_group_key(pk, p, m, e.extract_user_key(m)) == gk,
              "member " + m + " derived a wrong key");
        ++derivations;
      }
  };

  for (std::size_t size : {1u, 2u, 5u, 16u, 100u})
    for (std::size_t n : {1u, 4u, 16u, 100u}) {
      auto members = ids(size, "c2-" + std::to_string(size) + "-");
      groups::GroupState gs = groups::create_group(e, "c2", members, n);
      expect_all_derive(gs);
      expect_rejected(gs, "c2-outsider");
      if (size < 2) continue;
      const Key32 before = TA::gk(e, gs.sealed_gk);
      const std::vector<std::string> revoked = {members.front(), members.back()};
      for (const auto& r : revoked) groups::remove_user(e, gs, r);
      check(TA::gk(e, gs.sealed_gk) != before, "group key not rotated");
      expect_all_derive(gs);
      for (const auto& r : revoked) expect_rejected(gs, r);
      expect_rejected(gs, "c2-outsider");
    }
  const double secs = seconds_since(t0);
  check(secs < 120.0, "took " + std::to_string(secs) + " s");
  char buf[128];
  std::snprintf(buf, sizeof(buf), "20 configurations, %zu derivations, %zu rejections, %.1f s",
                derivations, rejections, secs);
  return buf;
}

// 3. Constant-time updates.
std::string criterion_3() {
  auto rng = crypto::Rng::seeded(303);
  const auto keys = ibbe::setup(ctx(), 101, rng);
  const auto& mk = keys.master;
  const auto& pk = keys.pub;
  std::vector<std::uint64_t> add_c, rem_c, rek_c, add_g2, rem_g2, rek_g2;
  for (std::size_t size : {1u, 100u}) {
    const auto s = ids(size, "c3-");
    const auto k = algebra::Scalar::random(rng);
    const auto enc = ibbe::encrypt_master(mk, pk, s, k);

    // add: S -> S + {x}
    auto target = s;
    target.push_back("c3-new");
    CountScope add_scope;
    const auto added = ibbe::add_user_to_cipher(mk, enc.cipher, "c3-new");
    add_c.push_back(add_scope.delta().cipher_exps());
    add_g2.push_back(add_scope.delta().g2_exp);
    check(added == ibbe::encrypt_master(mk, pk, target, k).cipher, "add != fresh");

    // remove: (T + {x}) -> T with |T| = size
    const auto k2 = algebra::Scalar::random(rng);
    const auto bigger = ibbe::encrypt_master(mk, pk, target, k);
    CountScope rem_scope;
    const auto removed = ibbe::remove_user_from_cipher(mk, pk, bigger.cipher, "c3-new", k2);
    rem_c.push_back(rem_scope.delta().cipher_exps());
    rem_g2.push_back(rem_scope.delta().g2_exp);
    const auto fresh = ibbe::encrypt_master(mk, pk, s, k2);
    check(removed.cipher == fresh.cipher && removed.key == fresh.key, "remove != fresh");

    // rekey
    CountScope rek_scope;
    const auto rekeyed = ibbe::rekey_cipher(pk, enc.cipher, k2);
    rek_c.push_back(rek_scope.delta().cipher_exps());
    rek_g2.push_back(rek_scope.delta().g2_exp);
    check(rekeyed.cipher == fresh.cipher && rekeyed.key == fresh.key, "rekey != fresh");
  }
  check_eq(add_c[0], 2u, "add exps");
  check_eq(rem_c[0], 3u, "remove exps");
  check_eq(rek_c[0], 2u, "rekey exps");
  check(add_c[0] == add_c[1] && rem_c[0] == rem_c[1] && rek_c[0] == rek_c[1],
        "counts depend on |S|");
  check(add_g2[0] == add_g2[1] && rem_g2[0] == rem_g2[1] && rek_g2[0] == rek_g2[1],
        "G2 counts depend on |S|");
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "G1+G2 exps add/remove/rekey = %llu/%llu/%llu (G2 alone %llu/%llu/%llu) at |S| in {1,100}",
                (unsigned long long)add_c[0], (unsigned long long)rem_c[0],
                (unsigned long long)rek_c[0], (unsigned long long)add_g2[0],
                (unsigned long long)rem_g2[0], (unsigned long long)rek_g2[0]);
  return buf;
}

// 4. Complexity scaling by counters.
std::string criterion_4() {
  auto rng = crypto::Rng::seeded(404);
  const auto keys = ibbe::setup(ctx(), 1000, rng);
  for (std::size_t size : {1u, 10u, 100u, 1000u}) {
    const auto s = ids(size, "c4-");
    CountScope scope;
    ibbe::encrypt_master(keys.master, keys.pub, s, algebra::Scalar::random(rng));
    check_eq(scope.delta().scalar_mul, size, "encrypt_master scalar mults");
  }

  std::vector<double> ops;
  for (std::size_t n : {64u, 128u, 256u}) {
    const auto s = ids(n, "c4d-");
    const auto enc = ibbe::encrypt_master(keys.master, keys.pub, s, algebra::Scalar::random(rng));
    const auto uk = ibbe::extract_user_key(keys.master, s[n / 3]);
    CountScope scope;
    const auto bk = ibbe::decrypt(keys.pub, s, s[n / 3], uk, enc.cipher);
    ops.push_back(static_cast<double>(scope.delta().scalar_ops()));
    check(bk == enc.key, "decrypt failed");
  }
  const double r1 = ops[1] / ops[0];
  const double r2 = ops[2] / ops[1];
  check(r1 >= 3.5 && r1 <= 4.5 && r2 >= 3.5 && r2 <= 4.5, "decrypt ratio out of [3.5, 4.5]");

  Enclave e(ctx(), 16, crypto::Rng::seeded(405));
  auto remove_cost = [&](std::size_t members, std::size_t n) {
    groups::GroupState gs = groups::create_group(e, "c4", ids(members, "c4r-"), n);
    CountScope scope;
    groups::remove_user(e, gs, "c4r-0");
    return scope.delta().group_exps();
  };
  std::vector<std::uint64_t> by_m;
  for (std::size_t m : {1u, 2u, 4u, 8u}) by_m.push_back(remove_cost(16 * m, 16));
  const std::uint64_t step = by_m[1] - by_m[0];
  check(step > 0, "remove cost does not grow with m");
  check_eq(by_m[2], by_m[0] + 3 * step, "remove cost linear in m (m=4)");
  check_eq(by_m[3], by_m[0] + 7 * step, "remove cost linear in m (m=8)");
  check_eq(remove_cost(16, 4), remove_cost(64, 16), "remove cost depends on N at m=4");

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "scalar mults = |S|; decrypt ratios %.3f, %.3f; remove group exps %llu + %llu*(m-1)",
                r1, r2, (unsigned long long)by_m[0], (unsigned long long)step);
  return buf;
}

// 5. Metadata constancy and linearity.
std::string criterion_5() {
  auto rng = crypto::Rng::seeded(505);
  const auto keys = ibbe::setup(ctx(), 1000, rng);
  std::set<std::size_t> lens;
  for (std::size_t size : {1u, 10u, 100u, 1000u})
    lens.insert(ibbe::encrypt_master(keys.master, keys.pub, ids(size),
                                     algebra::Scalar::random(rng))
                    .cipher.serialize()
                    .size());
  check_eq(lens.size(), 1u, "cipher length varies");
  const std::size_t cipher_len = *lens.begin();

  // HE: exactly affine, fixed-width ids.
  std::vector<std::pair<double, double>> he;
  const Key32 gk = rng.key32();
  for (std::size_t n : {1u, 10u, 100u, 1000u}) {
    std::vector<std::pair<std::string, Key32>> members;
    for (std::size_t i = 0; i < n; ++i) {
      char id[32];
      std::snprintf(id, sizeof(id), "he%08zu", i);
      members.emplace_back(id, crypto::X25519KeyPair::generate(rng).public_key);
    }
    he.emplace_back(static_cast<double>(n),
                    static_cast<double>(hybrid::he_create_group("g", members, gk, rng).serialize().size()));
  }
  const double slope = (he[1].second - he[0].second) / (he[1].first - he[0].first);
  const double icept = he[0].second - slope * he[0].first;
  for (const auto& [n, b] : he) check(b == icept + slope * n, "HE metadata not affine");

  // IBBE-SGX: ciphertext payload depends on ceil(N/n) only.
  Enclave e(ctx(), 100, crypto::Rng::seeded(506));
  std::vector<std::size_t> envelope;
  for (std::size_t n_members : {1u, 100u, 101u, 200u, 1000u}) {
    const auto gs = groups::create_group(e, "c5", ids(n_members), 100);
    const std::size_t m = (n_members + 99) / 100;
    check_eq(gs.partitions.size(), m, "partition count");
    check_eq(gs.envelope_bytes(), m * groups::Partition::kEnvelopeSize, "envelope bytes");
    envelope.push_back(gs.envelope_bytes());
  }
  check(envelope[0] == envelope[1] && envelope[2] == envelope[3], "bytes grow within same m");
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "cipher %zu B for |S| in {1..1000}; HE %.0f + %.0f*N B; IBBE-SGX %zu B per partition",
                cipher_len, icept, slope, groups::Partition::kEnvelopeSize);
  return buf;
}

struct AskyWorld {
  Enclave enclave{ctx(), 1, crypto::Rng::seeded(606)};
  store::MemoryStore docs;
  store::MemoryStore objects;
  asky::AccessControl acl{enclave, docs};
  asky::WriterShield shield{enclave, objects};
  crypto::Rng rng = crypto::Rng::seeded(607);

  std::vector<std::pair<std::string, Key32>> readers(const std::string& group, std::size_t r) {
    std::vector<std::pair<std::string, Key32>> out;
    for (std::size_t i = 0; i < r; ++i) {
      const std::string id = group + "-r" + std::to_string(i);
      out.emplace_back(id, acl.create_user(id));
      acl.set_membership(group, id, asky::Role::kReader, asky::Action::kAdd);
    }
    const std::string w = group + "-w";
    acl.create_user(w);
    acl.set_membership(group, w, asky::Role::kWriter, asky::Action::kAdd);
    return out;
  }
};

// 6. Envelope byte accounting.
std::string criterion_6() {
  AskyWorld w;
  for (std::size_t r : {1u, 10u, 100u}) {
    const std::string g = "c6-" + std::to_string(r);
    w.readers(g, r);
    const Key32 fk = w.rng.key32();
    const auto s = w.enclave.asky_key_enveloping(g + "-w", g, fk);
    const auto x = w.enclave.asky_key_enveloping_indexed(g + "-w", g, fk);
    check_eq(s.fragments.size() * asky::kStandardFragmentSize, 60 * r, "standard fragments");
    check_eq(x.fragments.size() * asky::kIndexedFragmentSize, 88 * r, "indexed fragments");
    check_eq(x.payload_bytes(), 88 * r + 16, "indexed payload");
    // Wire: 10-byte header (+16 nonce) plus fragments, nothing else.
    check_eq(s.serialize().size(), 10 + 60 * r, "standard wire size");
    check_eq(x.serialize().size(), 10 + 16 + 88 * r, "indexed wire size");
  }
  return "60*r B standard, 88*r + 16 B indexed, r in {1,10,100}";
}

// 7. Read behavior.
std::string criterion_7() {
  AskyWorld w;
  const auto readers = w.readers("c7", 100);
  const Key32& signer = w.enclave.signing_public_key();

  asky::write_to_group(w.shield, "c7/indexed", "c7-w", "c7", as_bytes("payload"), w.rng,
                       asky::EnvelopeVariant::kIndexed);
  for (const auto& [id, key] : readers) {
    CountScope scope;
    asky::ReadStats stats;
    const Bytes out = asky::read_file_indexed(w.objects, "c7/indexed", key, signer, &stats);
    check(out == to_bytes("payload"), "indexed read wrong plaintext");
    check_eq(scope.delta().aead_decrypt, 1u, "indexed AEAD decryptions for " + id);
    check(stats.search_probes <= 7, "more than ceil(log2 100) probes");
    // Cross-path: linear read over the same object agrees.
    check(asky::read_file(w.objects, "c7/indexed", key, signer) == out, "cross-path mismatch");
  }

  const int runs = 1000;
  double trials = 0;
  for (int i = 0; i < runs; ++i) {
    const std::string oid = "c7/std" + std::to_string(i);
    asky::write_to_group(w.shield, oid, "c7-w", "c7", as_bytes("x"), w.rng);
    const auto& key = readers[w.rng.uniform(readers.size())].second;
    CountScope scope;
    asky::ReadStats stats;
    asky::read_file(w.objects, oid, key, signer, &stats);
    check_eq(scope.delta().aead_decrypt, stats.aead_trials, "trial instrumentation");
    trials += static_cast<double>(stats.aead_trials);
  }
  const double mean = trials / runs;
  check(mean >= 45.5 && mean <= 55.5, "mean trials " + std::to_string(mean));
  char buf[128];
  std::snprintf(buf, sizeof(buf), "indexed: 1 AEAD decryption x100 readers; standard mean trials %.2f",
                mean);
  return buf;
}

// 8. Lazy revocation timeline.
std::string criterion_8() {
  AskyWorld w;
  const auto readers = w.readers("c8", 5);
  const Key32& signer = w.enclave.signing_public_key();
  const auto& u = readers[2];
  asky::write_to_group(w.shield, "c8/one", "c8-w", "c8", as_bytes("first"), w.rng);
  w.acl.set_membership("c8", u.first, asky::Role::kReader, asky::Action::kRemove);
  asky::write_to_group(w.shield, "c8/two", "c8-w", "c8", as_bytes("second"), w.rng);
  check(asky::read_file(w.objects, "c8/one", u.second, signer) == to_bytes("first"),
        "revoked user lost access to the old object");
  check_eq(code_of([&] { asky::read_file(w.objects, "c8/two", u.second, signer); }),
           ErrorCode::kAccessDenied, "revoked user on new object");
  for (const auto& [id, key] : readers) {
    if (id == u.first) continue;
    check(asky::read_file(w.objects, "c8/one", key, signer) == to_bytes("first"), id);
    check(asky::read_file(w.objects, "c8/two", key, signer) == to_bytes("second"), id);
  }
  return "write1, revoke, write2: revoked reads 1 not 2; 4 others read both";
}

// 9. Repartition heuristic.
std::string criterion_9() {
  Enclave e(ctx(), 10, crypto::Rng::seeded(909));
  auto all_derive = [&](const groups::GroupState& gs) {
    const Key32 gk = TA::gk(e, gs.sealed_gk);
    for (const auto& m : gs.members())
      check(groups::derive_group_key(e.public_key(), gs.partition_of(m), m, e.extract_user_key(m)) ==
                gk,
            "member " + m + " cannot derive gk");
  };

  // Small case: n = 3, [2,2] -> [3,1].
  groups::GroupState small = groups::create_group(e, "c9a", ids(6), 3);
  groups::remove_user(e, small, "m0");
  groups::remove_user(e, small, "m3");
  check(small.partition_sizes() == std::vector<std::size_t>{2, 2}, "setup [2,2]");
  check(groups::maybe_repartition(e, small), "[2,2] did not trigger");
  check(small.partition_sizes() == std::vector<std::size_t>{3, 1}, "not recreated as [3,1]");
  all_derive(small);

  // n = 10: [6,6,10,10] has half its partitions at <= ceil(20/3) = 7.
  groups::GroupState gs = groups::create_group(e, "c9b", ids(40), 10);
  for (const char* u : {"m0", "m1", "m2", "m3", "m10", "m11", "m12", "m13"})
    groups::remove_user(e, gs, u);
  check(gs.partition_sizes() == std::vector<std::size_t>{6, 6, 10, 10}, "setup [6,6,10,10]");
  const auto members = gs.members();
  const Key32 gk = TA::gk(e, gs.sealed_gk);
  check(groups::maybe_repartition(e, gs), "[6,6,10,10] did not trigger");
  check_eq(gs.partitions.size(), (members.size() + 9) / 10, "partition count after");
  check(gs.members() == members, "membership changed");
  check(TA::gk(e, gs.sealed_gk) == gk, "group key changed");
  gs.check_invariants();
  all_derive(gs);

  // [8,8,10,10]: no partition at <= 7.
  groups::GroupState calm = groups::create_group(e, "c9c", ids(40), 10);
  for (const char* u : {"m0", "m1", "m10", "m11"}) groups::remove_user(e, calm, u);
  const Bytes before = [&] {
    Bytes b;
    for (const auto& p : calm.partitions) {
      const Bytes s = p.serialize();
      b.insert(b.end(), s.begin(), s.end());
    }
    return b;
  }();
  check(!groups::maybe_repartition(e, calm), "[8,8,10,10] triggered");
  Bytes after;
  for (const auto& p : calm.partitions) {
    const Bytes s = p.serialize();
    after.insert(after.end(), s.begin(), s.end());
  }
  check(before == after, "non-triggering state changed");
  all_derive(calm);
  return "[2,2]->[3,1] (n=3); [6,6,10,10]->4 partitions (n=10); [8,8,10,10] untouched";
}

// 10. Trace replay shape.
std::string criterion_10() {
  const auto t0 = Clock::now();
  const auto ops = trace::gen_synthetic(10000, 0.2, 2017);
  std::vector<bench::ReplaySummary> rows;
  for (std::size_t n : {250u, 500u, 1000u, 2000u}) {
    bench::ReplayConfig cfg;
    cfg.partition_size = n;
    cfg.seed = 2017;
    cfg.derive_samples = 4;
    rows.push_back(bench::replay(ops, cfg));
  }
  std::ostringstream detail;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    detail << (i ? "; " : "") << "n=" << rows[i].partition_size
           << " admin=" << rows[i].admin_counters.group_exps()
           << " derive=" << rows[i].derive_counters.scalar_ops();
    if (i == 0) continue;
    check(rows[i].admin_counters.group_exps() < rows[i - 1].admin_counters.group_exps(),
          "admin group exps not decreasing: " + detail.str());
    check(rows[i].derive_counters.scalar_ops() > rows[i - 1].derive_counters.scalar_ops(),
          "derive scalar ops not increasing: " + detail.str());
  }
  const double secs = seconds_since(t0);
  check(secs < 300.0, "took " + std::to_string(secs) + " s");
  detail << "; " << std::fixed;
  detail.precision(1);
  detail << secs << " s";
  return detail.str();
}

// 11. Storage blindness.
std::string criterion_11() {
  ibbesgx::testing::TempDir dir;
  store::FileStore st(dir.path() / "cloud");
  Enclave e(ctx(), 4, crypto::Rng::seeded(1111));
  std::vector<Bytes> secrets;
  auto add_secret = [&](std::span<const std::uint8_t> s) { secrets.push_back(bytes_of(s)); };
  add_secret(TA::master(e).gamma.to_bytes());

  // IBBE-SGX group through the administrator.
  groups::GroupAdmin admin(e, &st);
  admin.create("team", ids(10, "t"), 4);
  add_secret(TA::gk(e, admin.state().sealed_gk));
  for (const char* u : {"t10", "t11", "t12"}) {
    admin.add(u);
    add_secret(TA::gk(e, admin.state().sealed_gk));
  }
  for (const char* u : {"t0", "t5", "t11"}) {
    admin.remove(u);
    add_secret(TA::gk(e, admin.state().sealed_gk));
  }
  for (const auto& m : admin.state().members()) {
    const auto uk = e.extract_user_key(m);
    add_secret(uk.sk.to_bytes());
    const auto p = groups::load_partition(st, "team", admin.state().partition_of(m).id);
    check(groups::derive_group_key(e.public_key(), p, m, uk) == TA::gk(e, admin.state().sealed_gk),
          "stored partition does not yield gk for " + m);
  }

  // A-Sky documents and objects in the same store.
  asky::AccessControl acl(e, st);
  asky::WriterShield shield(e, st);
  auto rng = crypto::Rng::seeded(1112);
  std::vector<std::pair<std::string, Key32>> readers;
  for (int i = 0; i < 6; ++i) {
    const std::string id = "reader" + std::to_string(i);
    readers.emplace_back(id, acl.create_user(id));
    add_secret(readers.back().second);
    acl.set_membership("docs", id, asky::Role::kReader, asky::Action::kAdd);
  }
  add_secret(acl.create_user("writer"));
  acl.set_membership("docs", "writer", asky::Role::kWriter, asky::Action::kAdd);
  const Key32& signer = e.signing_public_key();
  for (int i = 0; i < 4; ++i) {
    const std::string oid = "objects/" + std::to_string(i);
    asky::write_to_group(shield, oid, "writer", "docs", as_bytes("file body " + std::to_string(i)),
                         rng, i % 2 ? asky::EnvelopeVariant::kIndexed : asky::EnvelopeVariant::kStandard);
    if (i == 1) acl.set_membership("docs", "reader0", asky::Role::kReader, asky::Action::kRemove);
    // Recover fk the way a reader would, to know what to look for.
    const auto obj = asky::StoredObject::deserialize(st.get(oid));
    const auto pkg = asky::Package::deserialize(obj.package);
    for (const auto& f : pkg.envelope.fragments)
      if (auto fk = asky::open_fragment(readers[3].second, f)) add_secret(*fk);
    check(asky::read_file(st, oid, readers[3].second, signer) ==
              to_bytes("file body " + std::to_string(i)),
          "reader lost access");
  }
  check_eq(secrets.size(), 1u + 7u + admin.state().member_count() + 7u + 4u, "secret fixtures");

  std::size_t files = 0;
  std::size_t scanned = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir.path())) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    const Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    ++files;
    scanned += data.size();
    const std::string as_hex = hex(data);
    for (std::size_t i = 0; i < secrets.size(); ++i) {
      check(!contains(data, secrets[i]),
            "secret " + std::to_string(i) + " found in " + entry.path().string());
      check(as_hex.find(hex(secrets[i])) == std::string::npos,
            "hex of secret " + std::to_string(i) + " found in " + entry.path().string());
    }
  }
  check(files > 0, "nothing stored");
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%zu secrets absent from %zu stored files (%zu bytes)",
                secrets.size(), files, scanned);
  return buf;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<std::string()>>> criteria = {
      {"cross-path oracle", criterion_1},
      {"round-trip and revocation", criterion_2},
      {"constant-time updates", criterion_3},
      {"complexity by op counters", criterion_4},
      {"metadata constancy and linearity", criterion_5},
      {"A-Sky envelope bytes", criterion_6},
      {"A-Sky read behavior", criterion_7},
      {"lazy revocation timeline", criterion_8},
      {"repartition heuristic", criterion_9},
      {"trace replay shape", criterion_10},
      {"storage blindness", criterion_11},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, fn] = criteria[i];
    std::string detail;
    bool ok = false;
    try {
      detail = fn();
      ok = true;
    } catch (const std::exception& e) {
      detail = e.what();
    }
    failed += !ok;
    std::printf("[%s] criterion %2zu: %s -- %s\n", ok ? "PASS" : "FAIL", i + 1, name,
                detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
