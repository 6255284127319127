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

#include "ibbesgx/store.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>

#include "ibbesgx/error.hpp"

namespace ibbesgx::store {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kTempSuffix = ".tmp~";

std::atomic<std::uint64_t> temp_counter{0};

}  // namespace

void validate_id(std::string_view id) {
  if (id.empty()) fail(ErrorCode::kInvalidArgument, "empty object id");
  if (id.find('\0') != std::string_view::npos || id.find('\\') != std::string_view::npos)
    fail(ErrorCode::kInvalidArgument, "invalid character in object id");
  std::size_t start = 0;
  while (true) {
    const std::size_t end = id.find('/', start);
    const std::string_view seg =
        id.substr(start, end == std::string_view::npos ? id.npos : end - start);
    if (seg.empty() || seg == "." || seg == "..")
      fail(ErrorCode::kInvalidArgument, "invalid object id: " + std::string(id));
    if (seg.ends_with(kTempSuffix))
      fail(ErrorCode::kInvalidArgument, "reserved object id suffix");
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
}

std::size_t ObjectStore::total_bytes(std::string_view prefix) const {
  std::size_t total = 0;
  for (const auto& id : list(prefix)) total += get(id).size();
  return total;
}

// MemoryStore

void MemoryStore::put(std::string_view id, ByteView bytes) {
  validate_id(id);
  std::unique_lock lock(mu_);
  objects_.insert_or_assign(std::string(id), Bytes(bytes.begin(), bytes.end()));
}

Bytes MemoryStore::get(std::string_view id) const {
  validate_id(id);
  std::shared_lock lock(mu_);
  const auto it = objects_.find(id);
  if (it == objects_.end()) fail(ErrorCode::kNotFound, "no object " + std::string(id));
  return it->second;
}

bool MemoryStore::exists(std::string_view id) const {
  validate_id(id);
  std::shared_lock lock(mu_);
  return objects_.contains(id);
}

std::vector<std::string> MemoryStore::list(std::string_view prefix) const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (auto it = objects_.lower_bound(prefix);
       it != objects_.end() && it->first.starts_with(prefix); ++it)
    out.push_back(it->first);
  return out;
}

void MemoryStore::remove(std::string_view id) {
  validate_id(id);
  std::unique_lock lock(mu_);
  if (const auto it = objects_.find(id); it != objects_.end()) objects_.erase(it);
}

// FileStore

FileStore::FileStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec || !fs::is_directory(root_))
    fail(ErrorCode::kIo, "cannot create store root " + root_.string());
}

fs::path FileStore::path_of(std::string_view id) const {
  validate_id(id);
  return root_ / fs::path(std::string(id));
}

void FileStore::put(std::string_view id, ByteView bytes) {
  const fs::path target = path_of(id);
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) fail(ErrorCode::kIo, "cannot create directory for " + std::string(id));
  if (fs::is_directory(target))
    fail(ErrorCode::kInvalidArgument, "object id names a directory: " + std::string(id));

  fs::path tmp = target;
  tmp += "." + std::to_string(temp_counter.fetch_add(1)) + std::string(kTempSuffix);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      fail(ErrorCode::kIo, "write failed for " + std::string(id));
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::kIo, "rename failed for " + std::string(id));
  }
}

Bytes FileStore::get(std::string_view id) const {
  const fs::path p = path_of(id);
  if (!fs::is_regular_file(p)) fail(ErrorCode::kNotFound, "no object " + std::string(id));
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + std::string(id));
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return out;
}

bool FileStore::exists(std::string_view id) const {
  return fs::is_regular_file(path_of(id));
}

std::vector<std::string> FileStore::list(std::string_view prefix) const {
  std::vector<std::string> out;
  for (auto it = fs::recursive_directory_iterator(root_);
       it != fs::recursive_directory_iterator(); ++it) {
    if (!it->is_regular_file()) continue;
    std::string id = fs::relative(it->path(), root_).generic_string();
    if (std::string_view(id).ends_with(kTempSuffix)) continue;
    if (id.starts_with(prefix)) out.push_back(std::move(id));
  }
  std::sort(out.begin(), out.end());
  return out;
}

void FileStore::remove(std::string_view id) {
  const fs::path p = path_of(id);
  std::error_code ec;
  if (fs::is_regular_file(p)) fs::remove(p, ec);
  if (ec) fail(ErrorCode::kIo, "cannot remove " + std::string(id));
}

}  // namespace ibbesgx::store
