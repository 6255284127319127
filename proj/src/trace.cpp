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

#include "ibbesgx/trace.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "ibbesgx/error.hpp"

namespace ibbesgx::trace {

namespace {

constexpr std::string_view kHeader = "op,user_id";

// Present users with O(1) insert, erase and uniform pick.
class Membership {
 public:
  void add(const std::string& u) {
    pos_[u] = users_.size();
    users_.push_back(u);
  }
  void remove(const std::string& u) {
    const std::size_t i = pos_.at(u);
    pos_[users_.back()] = i;
    std::swap(users_[i], users_.back());
    users_.pop_back();
    pos_.erase(u);
  }
  bool contains(const std::string& u) const { return pos_.contains(u); }
  std::size_t size() const { return users_.size(); }
  const std::string& at(std::size_t i) const { return users_[i]; }

 private:
  std::vector<std::string> users_;
  std::unordered_map<std::string, std::size_t> pos_;
};

}  // namespace

std::string_view to_string(TraceOp::Kind k) {
  return k == TraceOp::Kind::kAdd ? "add" : "remove";
}

std::vector<TraceOp> gen_synthetic(std::size_t n_ops, double revocation_ratio,
                                   std::uint64_t seed) {
  if (!(revocation_ratio >= 0.0 && revocation_ratio <= 1.0))
    fail(ErrorCode::kInvalidArgument, "revocation ratio must be in [0, 1]");
  std::mt19937_64 gen(seed);
  const auto removes =
      static_cast<std::size_t>(std::llround(revocation_ratio * static_cast<double>(n_ops)));
  std::vector<bool> is_remove(n_ops, false);
  std::fill(is_remove.begin(), is_remove.begin() + static_cast<std::ptrdiff_t>(removes), true);
  std::shuffle(is_remove.begin(), is_remove.end(), gen);

  std::vector<TraceOp> ops;
  ops.reserve(n_ops);
  Membership present;
  std::size_t next_id = 0;
  std::size_t debt = 0;
  for (std::size_t i = 0; i < n_ops; ++i) {
    bool remove = is_remove[i];
    if (remove && present.size() == 0) {
      remove = false;
      ++debt;
    } else if (!remove && debt > 0 && present.size() > 0) {
      remove = true;
      --debt;
    }
    if (remove) {
      std::uniform_int_distribution<std::size_t> pick(0, present.size() - 1);
      std::string u = present.at(pick(gen));
      present.remove(u);
      ops.push_back({TraceOp::Kind::kRemove, std::move(u)});
    } else {
      std::string u = "u" + std::to_string(next_id++);
      present.add(u);
      ops.push_back({TraceOp::Kind::kAdd, std::move(u)});
    }
  }
  return ops;
}

TraceStats validate(const std::vector<TraceOp>& ops) {
  TraceStats s;
  std::unordered_set<std::string> present;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto& op = ops[i];
    if (op.op == TraceOp::Kind::kAdd) {
      if (!present.insert(op.user_id).second)
        fail(ErrorCode::kParse, "op " + std::to_string(i + 1) + ": add of present user " + op.user_id);
      ++s.adds;
      s.peak_members = std::max(s.peak_members, present.size());
    } else {
      if (present.erase(op.user_id) == 0)
        fail(ErrorCode::kParse, "op " + std::to_string(i + 1) + ": remove of absent user " + op.user_id);
      ++s.removes;
    }
  }
  s.final_members = present.size();
  return s;
}

std::vector<TraceOp> parse_trace(std::string_view csv) {
  std::vector<TraceOp> ops;
  std::unordered_set<std::string> present;
  std::size_t line_no = 0;
  auto error = [&](const std::string& what) {
    fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + what);
  };
  while (!csv.empty()) {
    ++line_no;
    const std::size_t nl = csv.find('\n');
    std::string_view line = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    if (line.ends_with('\r')) line.remove_suffix(1);
    if (line.empty()) {
      if (csv.empty()) break;
      error("empty line");
    }
    if (line_no == 1 && line == kHeader) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos) error("expected \"op,user_id\"");
    const std::string_view op = line.substr(0, comma);
    const std::string user(line.substr(comma + 1));
    if (user.empty()) error("empty user id");
    if (user.find(',') != std::string::npos) error("too many fields");
    if (op == "add") {
      if (!present.insert(user).second) error("add of present user " + user);
      ops.push_back({TraceOp::Kind::kAdd, user});
    } else if (op == "remove") {
      if (present.erase(user) == 0) error("remove of absent user " + user);
      ops.push_back({TraceOp::Kind::kRemove, user});
    } else {
      error("unknown op \"" + std::string(op) + "\"");
    }
  }
  return ops;
}

std::string serialize_trace(const std::vector<TraceOp>& ops) {
  std::string out(kHeader);
  out += '\n';
  for (const auto& op : ops) {
    out += to_string(op.op);
    out += ',';
    out += op.user_id;
    out += '\n';
  }
  return out;
}

}  // namespace ibbesgx::trace
