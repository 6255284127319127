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

// Command-line harness: micro-benchmarks, trace replay, trace generation
// and metadata-size reports, all as CSV.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ibbesgx/bench.hpp"
#include "ibbesgx/error.hpp"
#include "ibbesgx/trace.hpp"

namespace {

using namespace ibbesgx;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rows go to --out when given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::trunc);
      if (!file_) fail(ErrorCode::kIo, "cannot open " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<std::size_t> range_or_usage(const std::string& flag, const std::string& spec) {
  try {
    return bench::parse_range(spec);
  } catch (const Error& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

bench::Scheme scheme_or_usage(const std::string& s) {
  try {
    return bench::parse_scheme(s);
  } catch (const Error& e) {
    throw UsageError(std::string("--scheme: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open trace " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IBBE-SGX group key management benchmarks"};
  app.require_subcommand(1);

  // bench
  std::string op;
  std::string scheme = "ibbe-sgx";
  std::string group_sizes = "1000";
  std::string partition_sizes = "1000";
  std::size_t iters = 10;
  std::size_t warmup = 2;
  std::uint64_t seed = 1;
  std::string out;
  bool indexed = false;
  auto* bench_cmd = app.add_subcommand("bench", "Micro-benchmark one operation");
  bench_cmd->add_option("operation", op, "setup|extract|create|add|remove|decrypt|envelope")
      ->required()
      ->check(CLI::IsMember({"setup", "extract", "create", "add", "remove", "decrypt", "envelope"}));
  bench_cmd->add_option("--scheme", scheme, "ibbe-sgx or he");
  bench_cmd->add_option("--group-size", group_sizes, "A, A..B or A..BxF");
  bench_cmd->add_option("--partition-size", partition_sizes, "A, A..B or A..BxF");
  bench_cmd->add_option("--iters", iters, "Timed iterations")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--warmup", warmup, "Untimed iterations");
  bench_cmd->add_option("--seed", seed, "RNG seed");
  bench_cmd->add_option("--out", out, "CSV file (default stdout)");
  bench_cmd->add_flag("--indexed", indexed, "Label-indexed envelopes (envelope only)");

  // metadata
  auto* meta_cmd = app.add_subcommand("metadata", "Group metadata size per scheme");
  meta_cmd->add_option("--scheme", scheme, "ibbe-sgx or he");
  meta_cmd->add_option("--group-size", group_sizes, "A, A..B or A..BxF");
  meta_cmd->add_option("--partition-size", partition_sizes, "A, A..B or A..BxF");
  meta_cmd->add_option("--seed", seed, "RNG seed");
  meta_cmd->add_option("--out", out, "CSV file (default stdout)");

  // replay
  std::string trace_path;
  double ratio = -1;
  std::size_t n_ops = 10000;
  std::size_t samples = 8;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a membership trace");
  replay_cmd->add_option("--trace", trace_path, "CSV trace file")->check(CLI::ExistingFile);
  replay_cmd->add_option("--revocation-ratio", ratio, "Generate a synthetic trace instead")
      ->check(CLI::Range(0.0, 1.0));
  replay_cmd->add_option("--ops", n_ops, "Synthetic trace length");
  replay_cmd->add_option("--scheme", scheme, "ibbe-sgx or he");
  replay_cmd->add_option("--partition-size", partition_sizes, "A, A..B or A..BxF");
  replay_cmd->add_option("--derive-samples", samples, "Members sampled for derive timing");
  replay_cmd->add_option("--seed", seed, "RNG seed");
  replay_cmd->add_option("--out", out, "CSV file (default stdout)");

  // gen-trace
  auto* gen_cmd = app.add_subcommand("gen-trace", "Write a synthetic trace");
  gen_cmd->add_option("--ops", n_ops, "Number of operations");
  gen_cmd->add_option("--revocation-ratio", ratio, "Fraction of removals")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--seed", seed, "RNG seed");
  gen_cmd->add_option("--out", out, "CSV file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (bench_cmd->parsed()) {
      const auto s = scheme_or_usage(scheme);
      if ((op == "setup" || op == "extract") && s != bench::Scheme::kIbbeSgx)
        throw UsageError(op + " is only defined for --scheme ibbe-sgx");
      if (indexed && op != "envelope") throw UsageError("--indexed applies to envelope only");
      const auto gs = range_or_usage("--group-size", group_sizes);
      const auto ps = range_or_usage("--partition-size", partition_sizes);
      Output o(out);
      o.os() << bench::csv_header() << '\n';
      for (const auto g : gs)
        for (const auto p : ps) {
          bench::BenchConfig cfg;
          cfg.scheme = s;
          cfg.group_size = g;
          cfg.partition_size = p;
          cfg.iterations = iters;
          cfg.warmup = warmup;
          cfg.seed = seed;
          cfg.indexed = indexed;
          o.os() << bench::to_csv(bench::run(op, cfg)) << '\n' << std::flush;
        }
    } else if (meta_cmd->parsed()) {
      const auto s = scheme_or_usage(scheme);
      const auto gs = range_or_usage("--group-size", group_sizes);
      const auto ps = range_or_usage("--partition-size", partition_sizes);
      Output o(out);
      o.os() << bench::csv_header() << '\n';
      for (const auto g : gs)
        for (const auto p : ps) {
          bench::BenchConfig cfg;
          cfg.scheme = s;
          cfg.group_size = g;
          cfg.partition_size = p;
          cfg.iterations = 1;
          cfg.warmup = 0;
          cfg.seed = seed;
          o.os() << bench::to_csv(bench::run("create", cfg)) << '\n' << std::flush;
        }
    } else if (replay_cmd->parsed()) {
      if (trace_path.empty() == (ratio < 0))
        throw UsageError("replay needs exactly one of --trace or --revocation-ratio");
      const auto s = scheme_or_usage(scheme);
      const auto ps = range_or_usage("--partition-size", partition_sizes);
      const auto ops = trace_path.empty() ? trace::gen_synthetic(n_ops, ratio, seed)
                                          : trace::parse_trace(read_file(trace_path));
      Output o(out);
      o.os() << bench::replay_csv_header() << '\n';
      for (const auto p : ps) {
        bench::ReplayConfig cfg;
        cfg.scheme = s;
        cfg.partition_size = p;
        cfg.seed = seed;
        cfg.derive_samples = samples;
        o.os() << bench::to_csv(bench::replay(ops, cfg)) << '\n' << std::flush;
        if (s == bench::Scheme::kHe) break;  // partition size does not apply
      }
    } else if (gen_cmd->parsed()) {
      Output o(out);
      o.os() << trace::serialize_trace(trace::gen_synthetic(n_ops, ratio, seed));
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
