/*
 * test_auth.cpp
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

#include <random>

#include "doctest.h"
#include "mlpod/auth/authpod.hpp"
#include "mlpod/common/error.hpp"

using namespace mlpod;
using namespace mlpod::auth;

namespace {

constexpr std::int64_t kT0 = 1'700'000'000;

ClientRegistry test_registry() {
  return ClientRegistry::from_json(R"({"clients":[
    {"client_id":"doctor1","client_secret":"secret","scopes":["app:access","model:execute"]},
    {"client_id":"admin","client_secret":"root","scopes":["model:admin","data:read","data:write"]},
    {"client_id":"vpn","client_secret":"v","scopes":["data:read"],"net":["10.8.0.0/16","fd00::/8"],
     "limits":{"max_jobs":2,"max_input_bytes":1024}}
  ]})");
}

struct Fixture {
  std::int64_t now = kT0;
  AuthPod pod{test_registry(), Bytes(32, 0x5A), [this] { return now; }};
};

Errc error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::kInternal;
}

}  // namespace

TEST_CASE("issue and verify round trip") {
  Fixture f;
  auto token = f.pod.issue_token("doctor1", "secret", {"app:access", "model:execute"}, 3600);
  CHECK(token.claims.exp == kT0 + 3600);
  Claims c = f.pod.verify_token(token.encoded, "model:execute");
  CHECK(c.sub() == "doctor1");
  CHECK(c.has_scope("app:access"));
  CHECK_FALSE(c.has_scope("data:read"));
}

TEST_CASE("issue rejects bad credentials and scopes with distinct codes") {
  Fixture f;
  CHECK(error_of([&] { f.pod.issue_token("doctor1", "wrong-secret", {"app:access"}, 3600); }) ==
        Errc::kAuthFailure);
  CHECK(error_of([&] { f.pod.issue_token("nobody", "secret", {"app:access"}, 3600); }) ==
        Errc::kAuthFailure);
  CHECK(error_of([&] { f.pod.issue_token("doctor1", "secret", {"model:admin"}, 3600); }) ==
        Errc::kScopeDenied);
}

TEST_CASE("verify distinguishes each failure") {
  Fixture f;
  auto token = f.pod.issue_token("doctor1", "secret", {"app:access"}, 60);

  SUBCASE("expired") {
    f.now = kT0 + 60;
    CHECK(error_of([&] { f.pod.verify_token(token.encoded, ""); }) == Errc::kExpired);
  }
  SUBCASE("not yet valid") {
    f.now = kT0 - 1;
    CHECK(error_of([&] { f.pod.verify_token(token.encoded, ""); }) == Errc::kNotYetValid);
  }
  SUBCASE("missing scope") {
    CHECK(error_of([&] { f.pod.verify_token(token.encoded, "data:read"); }) ==
          Errc::kMissingScope);
  }
  SUBCASE("tampered payload byte") {
    std::string bad = token.encoded;
    auto dot = bad.find('.');
    bad[dot + 3] = bad[dot + 3] == 'A' ? 'B' : 'A';
    CHECK(error_of([&] { f.pod.verify_token(bad, ""); }) == Errc::kBadSignature);
  }
  SUBCASE("wrong key") {
    TokenVerifier other(Bytes(32, 0x5B));
    CHECK(error_of([&] { other.verify_token(token.encoded, "", {kT0, std::nullopt}); }) ==
          Errc::kBadSignature);
  }
  SUBCASE("garbage") {
    CHECK(error_of([&] { f.pod.verify_token("not-a-token", ""); }) == Errc::kBadSignature);
    CHECK(error_of([&] { f.pod.verify_token("a.b.c.d", ""); }) == Errc::kBadSignature);
  }
}

TEST_CASE("network restriction uses the CIDR allow-list") {
  Fixture f;
  auto token = f.pod.issue_token("vpn", "v", {"data:read"}, 60);
  CHECK(token.claims.limits.max_jobs == 2u);
  CHECK(f.pod.verify_token(token.encoded, "data:read", "10.8.3.4").sub() == "vpn");
  CHECK(f.pod.verify_token(token.encoded, "", "fd12::1").sub() == "vpn");
  CHECK(f.pod.verify_token(token.encoded, "", "::ffff:10.8.0.9").sub() == "vpn");
  CHECK(error_of([&] { f.pod.verify_token(token.encoded, "", "10.9.0.1"); }) ==
        Errc::kNetworkRestricted);
  CHECK(error_of([&] { f.pod.verify_token(token.encoded, ""); }) == Errc::kNetworkRestricted);
}

TEST_CASE("cidr parsing") {
  CHECK(CidrBlock::parse("192.168.1.0/24")->contains("192.168.1.77"));
  CHECK_FALSE(CidrBlock::parse("192.168.1.0/24")->contains("192.168.2.1"));
  CHECK(CidrBlock::parse("0.0.0.0/0")->contains("8.8.8.8"));
  CHECK(CidrBlock::parse("127.0.0.1")->contains("127.0.0.1"));
  CHECK_FALSE(CidrBlock::parse("10.0.0.0/33").has_value());
  CHECK_FALSE(CidrBlock::parse("nonsense/8").has_value());
}

TEST_CASE("introspection") {
  Fixture f;
  auto admin_token = f.pod.issue_token("admin", "root", {"model:admin"}, 600);
  Claims admin = f.pod.verify_token(admin_token.encoded, "model:admin");
  auto token = f.pod.issue_token("doctor1", "secret", {"app:access"}, 60);

  auto live = f.pod.introspect(admin, token.encoded);
  CHECK(live.active);
  CHECK(live.claims->sub == "doctor1");
  CHECK_FALSE(f.pod.introspect(admin, "garbage").active);

  auto vpn_token = f.pod.issue_token("vpn", "v", {"data:read"}, 600);
  CHECK(f.pod.introspect(admin, vpn_token.encoded).active);

  f.now = kT0 + 61;
  auto dead = f.pod.introspect(admin, token.encoded);
  CHECK_FALSE(dead.active);
  CHECK_FALSE(dead.claims.has_value());

  Claims doctor = f.pod.verify_token(f.pod.issue_token("doctor1", "secret", {"app:access"}, 60).encoded, "");
  CHECK(error_of([&] { f.pod.introspect(doctor, token.encoded); }) == Errc::kScopeDenied);
}

TEST_CASE("property: round trip, scope monotonicity, and monotone expiry") {
  std::mt19937_64 rng(20240601);
  const std::vector<std::string> scopes = {"app:access", "model:execute"};
  for (int i = 0; i < 200; ++i) {
    Fixture f;
    std::set<std::string> req;
    for (const auto& s : scopes) {
      if (rng() & 1) req.insert(s);
    }
    const std::int64_t ttl = 1 + static_cast<std::int64_t>(rng() % 5000);
    auto token = f.pod.issue_token("doctor1", "secret", req, ttl);
    for (const auto& s : req) {
      CHECK_NOTHROW(f.pod.verify_token(token.encoded, s));
    }
    CHECK_NOTHROW(f.pod.verify_token(token.encoded, ""));
    f.now = kT0 + ttl;
    for (int k = 0; k < 5; ++k) {
      CHECK(error_of([&] { f.pod.verify_token(token.encoded, ""); }) == Errc::kExpired);
      f.now += static_cast<std::int64_t>(rng() % 100000);
    }
  }
}

TEST_CASE("property: any single-bit corruption is rejected") {
  Fixture f;
  std::mt19937_64 rng(99);
  int rejected = 0;
  const int trials = 2000;
  for (int i = 0; i < trials; ++i) {
    auto token = f.pod.issue_token("doctor1", "secret", {"app:access"}, 1 + static_cast<std::int64_t>(rng() % 9999));
    std::string bad = token.encoded;
    const std::size_t pos = rng() % bad.size();
    bad[pos] = static_cast<char>(bad[pos] ^ (1 << (rng() % 8)));
    try {
      f.pod.verify_token(bad, "");
    } catch (const Error&) {
      ++rejected;
    }
  }
  CHECK(rejected == trials);
}
