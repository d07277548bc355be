/*
 * token.cpp
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

#include "mlpod/auth/token.hpp"

#include <arpa/inet.h>

#include <array>
#include "json.hpp"

#include "mlpod/common/error.hpp"

namespace mlpod::auth {
namespace {

using Json = nlohmann::json;

constexpr std::array<std::string_view, 6> kKnownScopes = {
    scope::kDataRead,     scope::kDataWrite,     scope::kModelExecute,
    scope::kModelAdmin,   scope::kModelDispatch, scope::kAppAccess,
};

Json claims_to_json(const ClaimSet& c) {
  Json j;
  j["sub"] = c.sub;
  j["scope"] = format_scope_list(c.scopes);
  j["iat"] = c.iat;
  j["nbf"] = c.nbf;
  j["exp"] = c.exp;
  if (c.net) j["net"] = *c.net;
  Json limits = Json::object();
  if (c.limits.max_jobs) limits["max_jobs"] = *c.limits.max_jobs;
  if (c.limits.max_input_bytes) limits["max_input_bytes"] = *c.limits.max_input_bytes;
  if (!limits.empty()) j["limits"] = limits;
  return j;
}

std::optional<ClaimSet> claims_from_json(const Json& j) {
  if (!j.is_object()) return std::nullopt;
  try {
    ClaimSet c;
    c.sub = j.at("sub").get<std::string>();
    c.scopes = parse_scope_list(j.at("scope").get<std::string>());
    c.iat = j.at("iat").get<std::int64_t>();
    c.nbf = j.at("nbf").get<std::int64_t>();
    c.exp = j.at("exp").get<std::int64_t>();
    if (j.contains("net")) c.net = j.at("net").get<std::vector<std::string>>();
    if (j.contains("limits")) {
      const Json& l = j.at("limits");
      if (l.contains("max_jobs")) c.limits.max_jobs = l.at("max_jobs").get<std::uint64_t>();
      if (l.contains("max_input_bytes")) {
        c.limits.max_input_bytes = l.at("max_input_bytes").get<std::uint64_t>();
      }
    }
    return c;
  } catch (const Json::exception&) {
    return std::nullopt;
  }
}

struct Segments {
  std::string_view header;
  std::string_view claims;
  std::string_view signature;
};

std::optional<Segments> split_token(std::string_view encoded) {
  const auto first = encoded.find('.');
  if (first == std::string_view::npos) return std::nullopt;
  const auto second = encoded.find('.', first + 1);
  if (second == std::string_view::npos) return std::nullopt;
  if (encoded.find('.', second + 1) != std::string_view::npos) return std::nullopt;
  return Segments{encoded.substr(0, first), encoded.substr(first + 1, second - first - 1),
                  encoded.substr(second + 1)};
}

std::optional<Json> decode_json_segment(std::string_view segment) {
  auto raw = base64url_decode(segment);
  if (!raw) return std::nullopt;
  Json j = Json::parse(raw->begin(), raw->end(), nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

}  // namespace

bool is_known_scope(std::string_view s) {
  for (auto k : kKnownScopes) {
    if (k == s) return true;
  }
  return false;
}

std::set<std::string> parse_scope_list(std::string_view text) {
  std::set<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    auto end = text.find(' ', pos);
    if (end == std::string_view::npos) end = text.size();
    if (end > pos) out.emplace(text.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

std::string format_scope_list(const std::set<std::string>& scopes) {
  std::string out;
  for (const auto& s : scopes) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

bool Claims::has_scope(std::string_view s) const {
  return payload_.scopes.find(std::string(s)) != payload_.scopes.end();
}

void require_scope(const Claims& claims, std::string_view s) {
  if (!claims.has_scope(s)) fail(Errc::kScopeDenied, "token lacks scope " + std::string(s));
}

AccessToken sign_token(const ClaimSet& claims, ByteView key) {
  AccessToken token;
  token.claims = claims;
  const Json header = {{"alg", token.header.alg}, {"typ", token.header.typ}};
  std::string signing_input = base64url_encode(as_bytes(header.dump())) + "." +
                              base64url_encode(as_bytes(claims_to_json(claims).dump()));
  const Digest mac = hmac_sha256(key, as_bytes(signing_input));
  token.signature.assign(mac.begin(), mac.end());
  token.encoded = signing_input + "." + base64url_encode(mac);
  return token;
}

std::optional<ClaimSet> peek_claims(std::string_view encoded) {
  auto segs = split_token(encoded);
  if (!segs) return std::nullopt;
  auto j = decode_json_segment(segs->claims);
  if (!j) return std::nullopt;
  return claims_from_json(*j);
}

TokenVerifier::TokenVerifier(Bytes signing_key) : key_(std::move(signing_key)) {
  if (key_.size() < 32) fail(Errc::kInvalidArgument, "signing key must be at least 32 bytes");
}

Claims TokenVerifier::verify_token(std::string_view encoded, std::string_view required_scope,
                                   const VerifyContext& ctx) const {
  auto segs = split_token(encoded);
  if (!segs) fail(Errc::kBadSignature, "malformed token");
  auto sig = base64url_decode(segs->signature);
  if (!sig) fail(Errc::kBadSignature, "malformed signature segment");
  const std::string_view signing_input =
      encoded.substr(0, segs->header.size() + 1 + segs->claims.size());
  const Digest expected = hmac_sha256(key_, as_bytes(signing_input));
  if (!constant_time_equal(*sig, expected)) fail(Errc::kBadSignature, "signature mismatch");

  auto header = decode_json_segment(segs->header);
  if (!header || !header->is_object() || header->value("alg", "") != "HS256") {
    fail(Errc::kBadSignature, "unsupported token header");
  }
  auto body = decode_json_segment(segs->claims);
  std::optional<ClaimSet> claims = body ? claims_from_json(*body) : std::nullopt;
  if (!claims) fail(Errc::kBadSignature, "malformed claims");

  if (ctx.now < claims->nbf) fail(Errc::kNotYetValid, "token not yet valid");
  if (ctx.now >= claims->exp) fail(Errc::kExpired, "token expired");
  if (!required_scope.empty() &&
      claims->scopes.find(std::string(required_scope)) == claims->scopes.end()) {
    fail(Errc::kMissingScope, "token lacks scope " + std::string(required_scope));
  }
  if (ctx.enforce_network && claims->net) {
    bool allowed = false;
    if (ctx.peer_addr) {
      for (const auto& cidr_text : *claims->net) {
        auto cidr = CidrBlock::parse(cidr_text);
        if (cidr && cidr->contains(*ctx.peer_addr)) {
          allowed = true;
          break;
        }
      }
    }
    if (!allowed) fail(Errc::kNetworkRestricted, "peer address outside token network");
  }
  return Claims(std::move(*claims));
}

std::optional<CidrBlock> CidrBlock::parse(std::string_view text) {
  CidrBlock block;
  std::string addr(text);
  int prefix = -1;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    addr = std::string(text.substr(0, slash));
    const std::string p(text.substr(slash + 1));
    if (p.empty() || p.size() > 3 || p.find_first_not_of("0123456789") != std::string::npos) {
      return std::nullopt;
    }
    prefix = std::stoi(p);
  }
  if (inet_pton(AF_INET, addr.c_str(), block.bytes_) == 1) {
    block.family_ = AF_INET;
    if (prefix < 0) prefix = 32;
    if (prefix > 32) return std::nullopt;
  } else if (inet_pton(AF_INET6, addr.c_str(), block.bytes_) == 1) {
    block.family_ = AF_INET6;
    if (prefix < 0) prefix = 128;
    if (prefix > 128) return std::nullopt;
  } else {
    return std::nullopt;
  }
  block.prefix_ = prefix;
  return block;
}

bool CidrBlock::contains(std::string_view address) const {
  std::string addr(address);
  std::uint8_t probe[16] = {};
  int family = 0;
  if (inet_pton(AF_INET, addr.c_str(), probe) == 1) {
    family = AF_INET;
  } else if (inet_pton(AF_INET6, addr.c_str(), probe) == 1) {
    family = AF_INET6;
    // IPv4-mapped IPv6 peers (::ffff:a.b.c.d) match IPv4 blocks.
    static constexpr std::uint8_t kMapped[12] = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0xFF, 0xFF};
    if (family_ == AF_INET && std::equal(kMapped, kMapped + 12, probe)) {
      std::copy(probe + 12, probe + 16, probe);
      family = AF_INET;
    }
  } else {
    return false;
  }
  if (family != family_) return false;
  int bits = prefix_;
  for (int i = 0; bits > 0; ++i, bits -= 8) {
    const std::uint8_t mask =
        bits >= 8 ? 0xFF : static_cast<std::uint8_t>(0xFF << (8 - bits));
    if ((probe[i] & mask) != (bytes_[i] & mask)) return false;
  }
  return true;
}

std::string claims_json(const ClaimSet& claims) { return claims_to_json(claims).dump(); }

}  // namespace mlpod::auth
