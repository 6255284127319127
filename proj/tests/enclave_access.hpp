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

#include "ibbesgx/enclave.hpp"

namespace ibbesgx::enclave {

// Reads enclave internals so tests can look for leaked secrets.
struct EnclaveTestAccess {
  static const ibbe::MasterKey& master(const Enclave& e) { return e.master_; }
  static const Key32& sealing_key(const Enclave& e) { return e.sealing_key_; }
  static const Key32& service_key(const Enclave& e) { return e.service_key_; }
  static const Key32& signing_seed(const Enclave& e) { return e.signer_.seed(); }
  static Key32 asky_key(const Enclave& e, const std::string& id) {
    return e.asky_keys_.at(id);
  }
  static Key32 gk(const Enclave& e, const SealedBlob& b) { return e.unseal_key(b); }
};

}  // namespace ibbesgx::enclave
