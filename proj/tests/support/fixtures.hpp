/*
 * fixtures.hpp
 *
 * This source file is part of the MLPod Sandbox open source project
 *
 * Copyright 2026 The MLPod Sandbox Authors
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

// Shared helpers for tests: verified claims with chosen scopes, and
// self-cleaning scratch directories.

#include <atomic>
#include <filesystem>
#include <set>
#include <string>

#include "mlpod/auth/token.hpp"
#include "mlpod/common/util.hpp"

namespace mlpod::testing {

inline const Bytes& test_signing_key() {
  static const Bytes key = to_bytes("test-signing-key-0123456789abcdef-xyz");
  return key;
}

inline std::string mint_token(const std::string& sub, const std::set<std::string>& scopes,
                              auth::ResourceLimits limits = {}, std::int64_t ttl = 3600) {
  auth::ClaimSet c;
  c.sub = sub;
  c.scopes = scopes;
  c.iat = unix_now();
  c.nbf = c.iat;
  c.exp = c.iat + ttl;
  c.limits = limits;
  return auth::sign_token(c, test_signing_key()).encoded;
}

inline auth::Claims claims_for(const std::string& sub, const std::set<std::string>& scopes,
                               auth::ResourceLimits limits = {}) {
  auth::TokenVerifier verifier(test_signing_key());
  return verifier.verify_token(mint_token(sub, scopes, limits), "", {unix_now(), {}, true});
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("mlpod-test-" + new_ulid() + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace mlpod::testing
