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

// Object storage standing in for the untrusted cloud provider.
//
// Ids are "/"-separated relative paths. Empty segments, "." and ".." are
// rejected so a filesystem backend can never escape its root.

#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "ibbesgx/bytes.hpp"

namespace ibbesgx::store {

/// Throws kInvalidArgument unless `id` is a well-formed object id.
void validate_id(std::string_view id);

class ObjectStore {
 public:
  virtual ~ObjectStore() = default;

  virtual void put(std::string_view id, ByteView bytes) = 0;
  /// Throws kNotFound for an unknown id.
  virtual Bytes get(std::string_view id) const = 0;
  virtual bool exists(std::string_view id) const = 0;
  /// Ids starting with `prefix`, in lexicographic order.
  virtual std::vector<std::string> list(std::string_view prefix = {}) const = 0;
  /// Removing a missing id is a no-op.
  virtual void remove(std::string_view id) = 0;

  /// Sum of stored object sizes under `prefix`.
  std::size_t total_bytes(std::string_view prefix = {}) const;
};

class MemoryStore final : public ObjectStore {
 public:
  void put(std::string_view id, ByteView bytes) override;
  Bytes get(std::string_view id) const override;
  bool exists(std::string_view id) const override;
  std::vector<std::string> list(std::string_view prefix = {}) const override;
  void remove(std::string_view id) override;

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, Bytes, std::less<>> objects_;
};

/// One file per object under `root`. Writes go to a temporary sibling and
/// are renamed into place.
class FileStore final : public ObjectStore {
 public:
  explicit FileStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  void put(std::string_view id, ByteView bytes) override;
  Bytes get(std::string_view id) const override;
  bool exists(std::string_view id) const override;
  std::vector<std::string> list(std::string_view prefix = {}) const override;
  void remove(std::string_view id) override;

 private:
  std::filesystem::path path_of(std::string_view id) const;

  std::filesystem::path root_;
};

}  // namespace ibbesgx::store
