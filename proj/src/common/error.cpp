/*
 * error.cpp
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

#include "mlpod/common/error.hpp"

#include <array>
#include <utility>

namespace mlpod {
namespace {

struct ErrcInfo {
  Errc code;
  std::string_view name;
  int status;
};

constexpr std::array kErrcTable = {
    ErrcInfo{Errc::kInvalidArgument, "invalid-argument", 400},
    ErrcInfo{Errc::kAuthFailure, "invalid_client", 401},
    ErrcInfo{Errc::kScopeDenied, "scope-denied", 403},
    ErrcInfo{Errc::kBadSignature, "bad-signature", 401},
    ErrcInfo{Errc::kExpired, "expired", 401},
    ErrcInfo{Errc::kNotYetValid, "not-yet-valid", 401},
    ErrcInfo{Errc::kMissingScope, "missing-scope", 403},
    ErrcInfo{Errc::kNetworkRestricted, "network-restricted", 403},
    ErrcInfo{Errc::kUnauthenticated, "unauthenticated", 401},
    ErrcInfo{Errc::kPayloadTooLarge, "payload-too-large", 413},
    ErrcInfo{Errc::kInvalidId, "invalid-id", 400},
    ErrcInfo{Errc::kNotFound, "not-found", 404},
    ErrcInfo{Errc::kValidationError, "validation-error", 422},
    ErrcInfo{Errc::kParseError, "parse-error", 400},
    ErrcInfo{Errc::kSchemaError, "schema-error", 400},
    ErrcInfo{Errc::kSerializeError, "serialize-error", 500},
    ErrcInfo{Errc::kLimitExceeded, "limit-exceeded", 429},
    ErrcInfo{Errc::kCycleDetected, "cycle-detected", 422},
    ErrcInfo{Errc::kDecryptFailure, "decrypt-failure", 400},
    ErrcInfo{Errc::kUnsupportedFormat, "unsupported-format", 400},
    ErrcInfo{Errc::kMissingInput, "missing-input", 400},
    ErrcInfo{Errc::kRunNotCompleted, "run-not-completed", 409},
    ErrcInfo{Errc::kUnknownKind, "unknown-kind", 400},
    ErrcInfo{Errc::kIoError, "io-error", 500},
    ErrcInfo{Errc::kTimeout, "timeout", 504},
    ErrcInfo{Errc::kUnavailable, "unavailable", 503},
    ErrcInfo{Errc::kInternal, "internal", 500},
};

}  // namespace

std::string_view errc_name(Errc code) {
  for (const auto& info : kErrcTable) {
    if (info.code == code) return info.name;
  }
  return "internal";
}

Errc errc_from_name(std::string_view name) {
  if (name == "invalid_scope" || name == "insufficient_scope") {
    return Errc::kScopeDenied;
  }
  for (const auto& info : kErrcTable) {
    if (info.name == name) return info.code;
  }
  return Errc::kInternal;
}

int http_status(Errc code) {
  for (const auto& info : kErrcTable) {
    if (info.code == code) return info.status;
  }
  return 500;
}

}  // namespace mlpod
