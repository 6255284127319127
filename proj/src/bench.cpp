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

#include "ibbesgx/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>

#include "ibbesgx/asky.hpp"
#include "ibbesgx/enclave.hpp"
#include "ibbesgx/error.hpp"
#include "ibbesgx/groups.hpp"
#include "ibbesgx/hybrid.hpp"

namespace ibbesgx::bench {

namespace {

using Clock = std::chrono::steady_clock;

const algebra::PairingCtx& pairing_ctx() {
  static const algebra::PairingCtx ctx;
  return ctx;
}

std::vector<std::string> member_ids(std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back("user" + std::to_string(i));
  return out;
}

std::size_t parse_size(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    fail(ErrorCode::kInvalidArgument, "not a number: \"" + std::string(s) + "\"");
  return v;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

double micros(Clock::duration d) { return std::chrono::duration<double, std::micro>(d).count(); }

// Runs prepare() untimed and op() timed, warmup + iterations times. The
// counters of the last timed op are kept.
struct Timing {
  std::vector<double> samples;
  OpCounts counters;
};

Timing measure(std::size_t warmup, std::size_t iterations, const std::function<void()>& prepare,
               const std::function<void()>& op) {
  Timing t;
  for (std::size_t i = 0; i < warmup + iterations; ++i) {
    prepare();
    CountScope scope;
    const auto start = Clock::now();
    op();
    const auto elapsed = Clock::now() - start;
    if (i >= warmup) {
      t.samples.push_back(micros(elapsed));
      t.counters = scope.delta();
    }
  }
  return t;
}

void require_ibbe(const BenchConfig& cfg, std::string_view op) {
  if (cfg.scheme != Scheme::kIbbeSgx)
    fail(ErrorCode::kInvalidArgument, std::string(op) + " is only defined for ibbe-sgx");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

Scheme parse_scheme(std::string_view s) {
  if (s == "ibbe-sgx") return Scheme::kIbbeSgx;
  if (s == "he") return Scheme::kHe;
  fail(ErrorCode::kInvalidArgument, "unknown scheme: " + std::string(s));
}

std::string_view to_string(Scheme s) { return s == Scheme::kIbbeSgx ? "ibbe-sgx" : "he"; }

std::vector<std::size_t> parse_range(std::string_view spec) {
  std::vector<std::size_t> out;
  if (spec.find(',') != std::string_view::npos) {
    std::size_t start = 0;
    while (start <= spec.size()) {
      const std::size_t end = std::min(spec.find(',', start), spec.size());
      out.push_back(parse_size(spec.substr(start, end - start)));
      start = end + 1;
    }
  } else if (const std::size_t dots = spec.find(".."); dots != std::string_view::npos) {
    const std::size_t a = parse_size(spec.substr(0, dots));
    std::string_view rest = spec.substr(dots + 2);
    std::size_t factor = 2;
    if (const std::size_t x = rest.find('x'); x != std::string_view::npos) {
      factor = parse_size(rest.substr(x + 1));
      rest = rest.substr(0, x);
    }
    const std::size_t b = parse_size(rest);
    if (a == 0 || b < a || factor < 2)
      fail(ErrorCode::kInvalidArgument, "range needs 0 < A <= B and factor >= 2");
    for (std::size_t v = a; v < b; v *= factor) out.push_back(v);
    out.push_back(b);
  } else {
    out.push_back(parse_size(spec));
  }
  for (const auto v : out)
    if (v == 0) fail(ErrorCode::kInvalidArgument, "sizes must be positive");
  return out;
}

std::string csv_header() {
  std::string h = "scheme,operation,group_size,partition_size,iterations,median_us,mean_us";
  for (const auto& [name, _] : OpCounts{}.fields()) h += "," + std::string(name);
  return h + ",metadata_bytes";
}

std::string to_csv(const BenchRecord& r) {
  std::ostringstream os;
  os << r.scheme << ',' << r.operation << ',' << r.group_size << ',' << r.partition_size << ','
     << r.iterations << ',' << fmt(r.median_us) << ',' << fmt(r.mean_us);
  for (const auto& [_, v] : r.counters.fields()) os << ',' << v;
  os << ',' << r.metadata_bytes;
  return os.str();
}

BenchRecord run(std::string_view operation, const BenchConfig& cfg) {
  if (cfg.group_size == 0 || cfg.partition_size == 0 || cfg.iterations == 0)
    fail(ErrorCode::kInvalidArgument, "sizes and iterations must be positive");
  BenchRecord rec;
  rec.scheme = std::string(to_string(cfg.scheme));
  rec.operation = std::string(operation);
  rec.group_size = cfg.group_size;
  rec.partition_size = cfg.partition_size;
  rec.iterations = cfg.iterations;

  auto rng = crypto::Rng::seeded(cfg.seed);
  const auto& ctx = pairing_ctx();
  const auto members = member_ids(cfg.group_size);
  const std::size_t n = std::min(cfg.partition_size, cfg.group_size);
  auto nothing = [] {};
  Timing t;

  if (operation == "setup") {
    require_ibbe(cfg, operation);
    t = measure(cfg.warmup, cfg.iterations, nothing, [&] {
      enclave::Enclave e(ctx, cfg.partition_size, crypto::Rng::seeded(cfg.seed));
      rec.metadata_bytes = e.public_key().serialize().size();
    });
  } else if (operation == "extract") {
    require_ibbe(cfg, operation);
    enclave::Enclave e(ctx, 1, crypto::Rng::seeded(cfg.seed));
    std::size_t i = 0;
    t = measure(cfg.warmup, cfg.iterations, nothing,
                [&] { e.extract_user_key(members[i++ % members.size()]); });
    rec.metadata_bytes = e.extract_user_key(members[0]).serialize().size();
  } else if (operation == "create" || operation == "add" || operation == "remove" ||
             operation == "decrypt") {
    if (cfg.scheme == Scheme::kIbbeSgx) {
      enclave::Enclave e(ctx, n, crypto::Rng::seeded(cfg.seed));
      if (operation == "create") {
        groups::GroupState gs;
        t = measure(cfg.warmup, cfg.iterations, nothing,
                    [&] { gs = groups::create_group(e, "bench", members, n); });
        rec.metadata_bytes = gs.metadata_bytes();
      } else {
        const groups::GroupState base = groups::create_group(e, "bench", members, n);
        groups::GroupState gs;
        std::size_t i = 0;
        if (operation == "add") {
          t = measure(cfg.warmup, cfg.iterations, [&] { gs = base; },
                      [&] { groups::add_user(e, gs, "joiner" + std::to_string(i++)); });
        } else if (operation == "remove") {
          t = measure(cfg.warmup, cfg.iterations, [&] { gs = base; },
                      [&] { groups::remove_user(e, gs, members[rng.uniform(members.size())]); });
        } else {
          const std::string& who = members[members.size() / 2];
          const ibbe::UserKey uk = e.extract_user_key(who);
          const groups::Partition& p = base.partition_of(who);
          t = measure(cfg.warmup, cfg.iterations, nothing,
                      [&] { groups::derive_group_key(e.public_key(), p, who, uk); });
          gs = base;
        }
        rec.metadata_bytes = gs.metadata_bytes();
      }
    } else {
      std::vector<std::pair<std::string, Key32>> pubs;
      hybrid::Directory dir;
      std::map<std::string, Key32, std::less<>> privs;
      for (const auto& m : members) {
        const auto kp = crypto::X25519KeyPair::generate(rng);
        pubs.emplace_back(m, kp.public_key);
        dir[m] = kp.public_key;
        privs[m] = kp.private_key;
      }
      const Key32 gk = rng.key32();
      hybrid::HEGroupMeta meta;
      if (operation == "create") {
        t = measure(cfg.warmup, cfg.iterations, nothing,
                    [&] { meta = hybrid::he_create_group("bench", pubs, gk, rng); });
      } else {
        const hybrid::HEGroupMeta base = hybrid::he_create_group("bench", pubs, gk, rng);
        std::size_t i = 0;
        if (operation == "add") {
          const Key32 pub = crypto::X25519KeyPair::generate(rng).public_key;
          t = measure(cfg.warmup, cfg.iterations, [&] { meta = base; }, [&] {
            hybrid::he_add_user(meta, "joiner" + std::to_string(i++), pub, gk, rng);
          });
        } else if (operation == "remove") {
          t = measure(cfg.warmup, cfg.iterations, [&] { meta = base; }, [&] {
            hybrid::he_remove_user(meta, members[rng.uniform(members.size())], dir,
                                   rng.key32(), rng);
          });
        } else {
          const std::string& who = members[members.size() / 2];
          t = measure(cfg.warmup, cfg.iterations, nothing,
                      [&] { hybrid::he_unwrap(base, who, privs.at(who)); });
          meta = base;
        }
      }
      rec.metadata_bytes = meta.metadata_bytes();
    }
  } else if (operation == "envelope") {
    rec.scheme = cfg.indexed ? "asky-indexed" : "asky";
    enclave::Enclave e(ctx, 1, crypto::Rng::seeded(cfg.seed));
    e.asky_create_user("writer");
    e.asky_set_membership("bench", "writer", enclave::Role::kWriter, enclave::Action::kAdd);
    for (const auto& m : members) {
      e.asky_create_user(m);
      e.asky_set_membership("bench", m, enclave::Role::kReader, enclave::Action::kAdd);
    }
    const Key32 fk = rng.key32();
    asky::Envelope env;
    t = measure(cfg.warmup, cfg.iterations, nothing, [&] {
      env = cfg.indexed ? e.asky_key_enveloping_indexed("writer", "bench", fk)
                        : e.asky_key_enveloping("writer", "bench", fk);
    });
    rec.metadata_bytes = env.serialize().size();
  } else {
    fail(ErrorCode::kInvalidArgument, "unknown operation: " + std::string(operation));
  }

  rec.median_us = median(t.samples);
  rec.mean_us = std::accumulate(t.samples.begin(), t.samples.end(), 0.0) /
                static_cast<double>(t.samples.size());
  rec.counters = t.counters;
  return rec;
}

// Replay

ReplaySummary replay(const std::vector<trace::TraceOp>& ops, const ReplayConfig& cfg) {
  if (cfg.partition_size == 0) fail(ErrorCode::kInvalidArgument, "partition size must be >= 1");
  const trace::TraceStats stats = trace::validate(ops);
  ReplaySummary s;
  s.scheme = std::string(to_string(cfg.scheme));
  s.partition_size = cfg.partition_size;
  s.ops = ops.size();
  s.adds = stats.adds;
  s.removes = stats.removes;

  auto rng = crypto::Rng::seeded(cfg.seed);
  std::vector<std::string> final_members;
  // Returns the derivation time in microseconds; counters cover only it.
  std::function<double(const std::string&, OpCounts&)> derive_once;

  // Admin-side state for both schemes; only one is used.
  std::optional<enclave::Enclave> enc;
  std::optional<groups::GroupAdmin> admin;
  hybrid::HEGroupMeta meta;
  hybrid::Directory directory;
  std::map<std::string, Key32, std::less<>> privs;

  if (cfg.scheme == Scheme::kIbbeSgx)
    enc.emplace(pairing_ctx(), cfg.partition_size, crypto::Rng::seeded(cfg.seed));

  const auto start = Clock::now();
  CountScope admin_scope;
  if (cfg.scheme == Scheme::kIbbeSgx) {
    admin.emplace(*enc);
    for (const auto& op : ops) {
      if (op.op == trace::TraceOp::Kind::kAdd) {
        if (!admin->created()) {
          const std::vector<std::string> first = {op.user_id};
          admin->create("trace", first, cfg.partition_size);
        } else {
          admin->add(op.user_id);
        }
      } else {
        admin->remove(op.user_id);
      }
    }
  } else {
    meta.group_id = "trace";
    Key32 gk = rng.key32();
    for (const auto& op : ops) {
      if (op.op == trace::TraceOp::Kind::kAdd) {
        const auto kp = crypto::X25519KeyPair::generate(rng);
        directory[op.user_id] = kp.public_key;
        privs[op.user_id] = kp.private_key;
        hybrid::he_add_user(meta, op.user_id, kp.public_key, gk, rng);
      } else {
        gk = rng.key32();
        hybrid::he_remove_user(meta, op.user_id, directory, gk, rng);
      }
    }
  }
  s.admin_counters = admin_scope.delta();
  s.admin_seconds = std::chrono::duration<double>(Clock::now() - start).count();

  if (cfg.scheme == Scheme::kIbbeSgx) {
    s.repartitions = admin->repartitions();
    if (admin->created()) {
      const auto& gs = admin->state();
      gs.check_invariants();
      final_members = gs.members();
      s.final_partitions = gs.partitions.size();
      s.final_metadata_bytes = gs.metadata_bytes();
      derive_once = [&](const std::string& who, OpCounts& counts) {
        const ibbe::UserKey uk = enc->extract_user_key(who);
        CountScope scope;
        const auto t0 = Clock::now();
        groups::derive_group_key(enc->public_key(), gs.partition_of(who), who, uk);
        const double us = micros(Clock::now() - t0);
        counts += scope.delta();
        return us;
      };
    }
  } else {
    for (const auto& [id, _] : meta.entries) final_members.push_back(id);
    s.final_partitions = final_members.empty() ? 0 : 1;
    s.final_metadata_bytes = meta.metadata_bytes();
    derive_once = [&](const std::string& who, OpCounts& counts) {
      CountScope scope;
      const auto t0 = Clock::now();
      hybrid::he_unwrap(meta, who, privs.at(who));
      const double us = micros(Clock::now() - t0);
      counts += scope.delta();
      return us;
    };
  }
  s.final_members = final_members.size();

  // Evenly spaced sample of the final membership.
  if (!final_members.empty() && cfg.derive_samples > 0) {
    const std::size_t k = std::min(cfg.derive_samples, final_members.size());
    double total_us = 0;
    OpCounts total;
    for (std::size_t i = 0; i < k; ++i)
      total_us += derive_once(final_members[i * final_members.size() / k], total);
    s.derive_samples = k;
    s.mean_derive_us = total_us / static_cast<double>(k);
    total /= k;
    s.derive_counters = total;
  }
  s.final_membership = std::move(final_members);
  return s;
}

std::string replay_csv_header() {
  return "scheme,partition_size,ops,adds,removes,repartitions,admin_seconds,admin_group_exps,"
         "admin_scalar_ops,admin_pairings,admin_aead_encrypt,admin_he_wrap,derive_samples,"
         "mean_derive_us,derive_scalar_ops,derive_group_exps,derive_pairings,final_members,"
         "final_partitions,final_metadata_bytes";
}

std::string to_csv(const ReplaySummary& s) {
  std::ostringstream os;
  os << s.scheme << ',' << s.partition_size << ',' << s.ops << ',' << s.adds << ',' << s.removes
     << ',' << s.repartitions << ',' << fmt(s.admin_seconds) << ','
     << s.admin_counters.group_exps() << ',' << s.admin_counters.scalar_ops() << ','
     << s.admin_counters.pairings << ',' << s.admin_counters.aead_encrypt << ','
     << s.admin_counters.he_wrap << ',' << s.derive_samples << ',' << fmt(s.mean_derive_us)
     << ',' << s.derive_counters.scalar_ops() << ',' << s.derive_counters.group_exps() << ','
     << s.derive_counters.pairings << ',' << s.final_members << ',' << s.final_partitions << ','
     << s.final_metadata_bytes;
  return os.str();
}

}  // namespace ibbesgx::bench
