/*
 * error.hpp
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlpod {

// Error codes shared by every pod. Each code maps to one wire name and one
// HTTP status; callers branch on the code, never on the message.
enum class Errc {
  kInvalidArgument,
  kAuthFailure,        // wire: invalid_client
  kScopeDenied,        // wire: invalid_scope / insufficient_scope
  kBadSignature,
  kExpired,
  kNotYetValid,
  kMissingScope,
  kNetworkRestricted,
  kUnauthenticated,    // no bearer token supplied
  kPayloadTooLarge,
  kInvalidId,
  kNotFound,
  kValidationError,
  kParseError,
  kSchemaError,
  kSerializeError,
  kLimitExceeded,
  kCycleDetected,
  kDecryptFailure,
  kUnsupportedFormat,
  kMissingInput,
  kRunNotCompleted,
  kUnknownKind,
  kIoError,
  kTimeout,
  kUnavailable,
  kInternal,
};

std::string_view errc_name(Errc code);
Errc errc_from_name(std::string_view name);
int http_status(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mlpod
