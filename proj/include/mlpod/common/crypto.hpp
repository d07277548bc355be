/*
 * crypto.hpp
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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlpod {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}
inline Bytes to_bytes(std::string_view s) {
  auto v = as_bytes(s);
  return {v.begin(), v.end()};
}
inline std::string to_string(ByteView b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

Digest sha256(ByteView data);
std::string sha256_hex(ByteView data);
Digest hmac_sha256(ByteView key, ByteView data);

std::string hex_encode(ByteView data);

// Timing-independent comparison for MACs and secrets.
bool constant_time_equal(ByteView a, ByteView b);

Bytes random_bytes(std::size_t n);

std::string base64_encode(ByteView data);
std::optional<Bytes> base64_decode(std::string_view text);

// Unpadded URL-safe alphabet. Decoding is strict: padding, foreign
// characters, and non-zero trailing bits are all rejected, so every byte
// string has exactly one accepted encoding.
std::string base64url_encode(ByteView data);
std::optional<Bytes> base64url_decode(std::string_view text);

inline constexpr std::size_t kGcmNonceSize = 12;
inline constexpr std::size_t kGcmTagSize = 16;

// AES-256-GCM. The returned ciphertext carries the 16-byte tag appended.
Bytes aes256gcm_encrypt(ByteView key, ByteView nonce, ByteView plaintext,
                        ByteView aad);
// Returns nullopt when authentication fails; no partial plaintext escapes.
std::optional<Bytes> aes256gcm_decrypt(ByteView key, ByteView nonce,
                                       ByteView ciphertext_and_tag,
                                       ByteView aad);

}  // namespace mlpod
