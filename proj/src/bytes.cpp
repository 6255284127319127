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

#include "ibbesgx/bytes.hpp"

#include <algorithm>

#include "ibbesgx/error.hpp"

namespace ibbesgx {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kInvalidElement: return "invalid group element";
    case ErrorCode::kCapacity: return "capacity exceeded";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kAlreadyMember: return "already a member";
    case ErrorCode::kNotMember: return "not a member";
    case ErrorCode::kDegenerate: return "degenerate input";
    case ErrorCode::kAuthentication: return "authentication failure";
    case ErrorCode::kIntegrity: return "integrity failure";
    case ErrorCode::kAccessDenied: return "access denied";
    case ErrorCode::kPermission: return "permission denied";
    case ErrorCode::kNotFound: return "not found";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kCrypto: return "crypto backend error";
  }
  return "unknown";
}

std::string hex(ByteView b) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(b.size() * 2);
  for (auto c : b) {
    s.push_back(kDigits[c >> 4]);
    s.push_back(kDigits[c & 0xf]);
  }
  return s;
}

Bytes from_hex(std::string_view s) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (s.size() % 2 != 0) fail(ErrorCode::kParse, "odd-length hex string");
  Bytes out(s.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(s[2 * i]);
    int lo = nibble(s[2 * i + 1]);
    if (hi < 0 || lo < 0) fail(ErrorCode::kParse, "invalid hex digit");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

bool contains(ByteView haystack, ByteView needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(),
                     needle.end()) != haystack.end();
}

void secure_zero(std::span<std::uint8_t> b) {
  volatile std::uint8_t* p = b.data();
  for (std::size_t i = 0; i < b.size(); ++i) p[i] = 0;
}

ByteWriter& ByteWriter::u16(std::uint16_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
  return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8)
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8)
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

ByteWriter& ByteWriter::lp(ByteView b) {
  if (b.size() > 0xffffffffu) fail(ErrorCode::kInvalidArgument, "field too long");
  u32(static_cast<std::uint32_t>(b.size()));
  return raw(b);
}

ByteView ByteReader::raw(std::size_t n) {
  if (n > remaining()) fail(ErrorCode::kParse, "truncated input");
  auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

void ByteReader::expect(std::string_view magic) {
  auto got = raw(magic.size());
  if (!std::equal(got.begin(), got.end(), as_bytes(magic).begin()))
    fail(ErrorCode::kParse, "bad magic, expected " + std::string(magic));
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint16_t ByteReader::u16() {
  auto b = raw(2);
  return static_cast<std::uint16_t>(b[0] << 8 | b[1]);
}

std::uint32_t ByteReader::u32() {
  auto b = raw(4);
  std::uint32_t v = 0;
  for (auto c : b) v = v << 8 | c;
  return v;
}

std::uint64_t ByteReader::u64() {
  auto b = raw(8);
  std::uint64_t v = 0;
  for (auto c : b) v = v << 8 | c;
  return v;
}

ByteView ByteReader::lp() { return raw(u32()); }

std::string ByteReader::lp_string() { return to_string(lp()); }

ByteView ByteReader::rest() { return raw(remaining()); }

void ByteReader::expect_done() const {
  if (!done()) fail(ErrorCode::kParse, "trailing bytes");
}

}  // namespace ibbesgx
