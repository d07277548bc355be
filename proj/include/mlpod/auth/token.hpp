/*
 * token.hpp
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

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mlpod/common/crypto.hpp"

namespace mlpod::auth {

namespace scope {
inline constexpr std::string_view kDataRead = "data:read";
inline constexpr std::string_view kDataWrite = "data:write";
inline constexpr std::string_view kModelExecute = "model:execute";
inline constexpr std::string_view kModelAdmin = "model:admin";
inline constexpr std::string_view kModelDispatch = "model:dispatch";
inline constexpr std::string_view kAppAccess = "app:access";
}  // namespace scope

bool is_known_scope(std::string_view s);
std::set<std::string> parse_scope_list(std::string_view space_separated);
std::string format_scope_list(const std::set<std::string>& scopes);

// Resource restrictions carried inside a token; nullopt means unrestricted.
struct ResourceLimits {
  std::optional<std::uint64_t> max_jobs;
  std::optional<std::uint64_t> max_input_bytes;

  bool operator==(const ResourceLimits&) const = default;
};

// The claims payload as it appears on the wire, before any verification.
struct ClaimSet {
  std::string sub;
  std::set<std::string> scopes;
  std::int64_t iat = 0;
  std::int64_t nbf = 0;
  std::int64_t exp = 0;
  std::optional<std::vector<std::string>> net;  // CIDR allow-list
  ResourceLimits limits;

  bool operator==(const ClaimSet&) const = default;
};

struct TokenHeader {
  std::string alg = "HS256";
  std::string typ = "JWT";
};

// Compact three-segment token: base64url(header).base64url(claims).base64url(mac)
struct AccessToken {
  TokenHeader header;
  ClaimSet claims;
  Bytes signature;
  std::string encoded;
};

// A verified claim set. Only TokenVerifier can construct one, so holding a
// Claims value is proof that the signature, validity window, and network
// restriction were checked.
class Claims {
 public:
  const std::string& sub() const { return payload_.sub; }
  const std::set<std::string>& scopes() const { return payload_.scopes; }
  bool has_scope(std::string_view s) const;
  const ResourceLimits& limits() const { return payload_.limits; }
  std::int64_t expires_at() const { return payload_.exp; }
  const ClaimSet& payload() const { return payload_; }

 private:
  friend class TokenVerifier;
  explicit Claims(ClaimSet payload) : payload_(std::move(payload)) {}
  ClaimSet payload_;
};

// Throws Errc::kScopeDenied unless the claims carry `s`.
void require_scope(const Claims& claims, std::string_view s);

struct VerifyContext {
  std::int64_t now = 0;
  std::optional<std::string> peer_addr;
  // Introspection has no requesting peer, so it skips the allow-list.
  bool enforce_network = true;
};

class TokenVerifier {
 public:
  explicit TokenVerifier(Bytes signing_key);

  // An empty required_scope skips the scope check.
  Claims verify_token(std::string_view encoded, std::string_view required_scope,
                      const VerifyContext& ctx) const;

  const Bytes& key() const { return key_; }

 private:
  Bytes key_;
};

// Signs an arbitrary claim set; used by the issuer and by tests that need
// tokens with hand-picked fields.
AccessToken sign_token(const ClaimSet& claims, ByteView key);

// The claims segment as compact JSON.
std::string claims_json(const ClaimSet& claims);

// Parses the JSON claims segment without checking the signature.
std::optional<ClaimSet> peek_claims(std::string_view encoded);

// CIDR allow-list matching for IPv4 and IPv6.
class CidrBlock {
 public:
  static std::optional<CidrBlock> parse(std::string_view text);
  bool contains(std::string_view address) const;

 private:
  int family_ = 0;
  std::uint8_t bytes_[16] = {};
  int prefix_ = 0;
};

}  // namespace mlpod::auth
