/*
 * authpod.cpp
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

#include "mlpod/auth/authpod.hpp"

#include "json.hpp"
#include "mlpod/common/error.hpp"

namespace mlpod::auth {

using Json = nlohmann::json;

ClientRegistry::ClientRegistry(std::vector<ClientRecord> clients) {
  for (auto& c : clients) {
    for (const auto& s : c.allowed_scopes) {
      if (!is_known_scope(s)) {
        fail(Errc::kValidationError, "client " + c.client_id + " lists unknown scope " + s);
      }
    }
    if (c.client_id.empty()) fail(Errc::kValidationError, "client_id must be non-empty");
    auto id = c.client_id;
    if (!clients_.emplace(id, std::move(c)).second) {
      fail(Errc::kValidationError, "duplicate client " + id);
    }
  }
}

ClientRegistry ClientRegistry::from_json(std::string_view text) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("clients")) {
    fail(Errc::kParseError, "client registry must be an object with a clients array");
  }
  std::vector<ClientRecord> clients;
  try {
    for (const auto& j : doc.at("clients")) {
      ClientRecord c;
      c.client_id = j.at("client_id").get<std::string>();
      c.client_secret = j.at("client_secret").get<std::string>();
      for (const auto& s : j.at("scopes")) c.allowed_scopes.insert(s.get<std::string>());
      if (j.contains("net")) c.net = j.at("net").get<std::vector<std::string>>();
      if (j.contains("limits")) {
        const auto& l = j.at("limits");
        if (l.contains("max_jobs")) c.limits.max_jobs = l.at("max_jobs").get<std::uint64_t>();
        if (l.contains("max_input_bytes")) {
          c.limits.max_input_bytes = l.at("max_input_bytes").get<std::uint64_t>();
        }
      }
      clients.push_back(std::move(c));
    }
  } catch (const Json::exception& e) {
    fail(Errc::kParseError, std::string("client registry: ") + e.what());
  }
  return ClientRegistry(std::move(clients));
}

ClientRegistry ClientRegistry::load(const std::filesystem::path& path) {
  return from_json(read_text_file(path));
}

const ClientRecord* ClientRegistry::find(std::string_view client_id) const {
  auto it = clients_.find(client_id);
  return it == clients_.end() ? nullptr : &it->second;
}

AuthPod::AuthPod(ClientRegistry registry, Bytes signing_key, Clock clock)
    : registry_(std::move(registry)), verifier_(std::move(signing_key)), clock_(std::move(clock)) {}

AccessToken AuthPod::issue_token(std::string_view client_id, std::string_view client_secret,
                                 const std::set<std::string>& requested_scopes,
                                 std::int64_t ttl_seconds) const {
  const ClientRecord* client = registry_.find(client_id);
  // Unknown id and wrong secret are indistinguishable to the caller.
  if (client == nullptr ||
      !constant_time_equal(as_bytes(client->client_secret), as_bytes(client_secret))) {
    fail(Errc::kAuthFailure, "invalid_client");
  }
  for (const auto& s : requested_scopes) {
    if (client->allowed_scopes.find(s) == client->allowed_scopes.end()) {
      fail(Errc::kScopeDenied, "invalid_scope");
    }
  }
  if (ttl_seconds <= 0) fail(Errc::kInvalidArgument, "ttl must be positive");

  ClaimSet claims;
  claims.sub = client->client_id;
  claims.scopes = requested_scopes;
  claims.iat = clock_();
  claims.nbf = claims.iat;
  claims.exp = claims.iat + ttl_seconds;
  claims.net = client->net;
  claims.limits = client->limits;
  return sign_token(claims, verifier_.key());
}

Claims AuthPod::verify_token(std::string_view encoded, std::string_view required_scope,
                             std::optional<std::string> peer_addr) const {
  return verifier_.verify_token(encoded, required_scope,
                                VerifyContext{clock_(), std::move(peer_addr), true});
}

Introspection AuthPod::introspect(const Claims& caller, std::string_view token) const {
  if (!caller.has_scope(scope::kModelAdmin)) fail(Errc::kScopeDenied, "introspection requires model:admin");
  try {
    Claims c = verifier_.verify_token(token, "", VerifyContext{clock_(), std::nullopt, false});
    return Introspection{true, c.payload()};
  } catch (const Error&) {
    return Introspection{false, std::nullopt};
  }
}

}  // namespace mlpod::auth
