/*
 * authpod.hpp
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

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mlpod/auth/token.hpp"
#include "mlpod/common/util.hpp"

namespace mlpod::auth {

struct ClientRecord {
  std::string client_id;
  std::string client_secret;
  std::set<std::string> allowed_scopes;
  std::optional<std::vector<std::string>> net;
  ResourceLimits limits;
};

// Immutable after construction; safe to share across request threads.
class ClientRegistry {
 public:
  ClientRegistry() = default;
  explicit ClientRegistry(std::vector<ClientRecord> clients);

  static ClientRegistry from_json(std::string_view text);
  static ClientRegistry load(const std::filesystem::path& path);

  const ClientRecord* find(std::string_view client_id) const;
  std::size_t size() const { return clients_.size(); }

 private:
  std::map<std::string, ClientRecord, std::less<>> clients_;
};

struct Introspection {
  bool active = false;
  std::optional<ClaimSet> claims;
};

class AuthPod {
 public:
  AuthPod(ClientRegistry registry, Bytes signing_key, Clock clock = system_clock());

  // Errors: kAuthFailure (invalid_client), kScopeDenied (invalid_scope).
  AccessToken issue_token(std::string_view client_id, std::string_view client_secret,
                          const std::set<std::string>& requested_scopes,
                          std::int64_t ttl_seconds) const;

  Claims verify_token(std::string_view encoded, std::string_view required_scope,
                      std::optional<std::string> peer_addr = std::nullopt) const;

  // Requires the caller to hold model:admin.
  Introspection introspect(const Claims& caller, std::string_view token) const;

  const TokenVerifier& verifier() const { return verifier_; }
  std::int64_t now() const { return clock_(); }

 private:
  ClientRegistry registry_;
  TokenVerifier verifier_;
  Clock clock_;
};

}  // namespace mlpod::auth
