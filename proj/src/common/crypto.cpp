/*
 * crypto.cpp
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

#include "mlpod/common/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <memory>

#include "mlpod/common/error.hpp"

namespace mlpod {
namespace {

constexpr char kHexDigits[] = "0123456789abcdef";
constexpr char kB64[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
constexpr char kB64Url[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

std::string encode_base64(ByteView data, const char* alphabet, bool pad) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= data.size(); i += 3) {
    std::uint32_t n = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out += alphabet[(n >> 18) & 63];
    out += alphabet[(n >> 12) & 63];
    out += alphabet[(n >> 6) & 63];
    out += alphabet[n & 63];
  }
  const std::size_t rest = data.size() - i;
  if (rest == 1) {
    std::uint32_t n = data[i] << 16;
    out += alphabet[(n >> 18) & 63];
    out += alphabet[(n >> 12) & 63];
    if (pad) out += "==";
  } else if (rest == 2) {
    std::uint32_t n = (data[i] << 16) | (data[i + 1] << 8);
    out += alphabet[(n >> 18) & 63];
    out += alphabet[(n >> 12) & 63];
    out += alphabet[(n >> 6) & 63];
    if (pad) out += '=';
  }
  return out;
}

int decode_char(char c, bool url) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (url) {
    if (c == '-') return 62;
    if (c == '_') return 63;
  } else {
    if (c == '+') return 62;
    if (c == '/') return 63;
  }
  return -1;
}

// Decodes unpadded text; rejects lengths of 1 mod 4 and non-zero slack bits.
std::optional<Bytes> decode_unpadded(std::string_view text, bool url) {
  if (text.size() % 4 == 1) return std::nullopt;
  Bytes out;
  out.reserve(text.size() * 3 / 4);
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    int v = decode_char(c, url);
    if (v < 0) return std::nullopt;
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  if (bits > 0 && (acc & ((1u << bits) - 1)) != 0) return std::nullopt;
  return out;
}

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

void check_gcm_params(ByteView key, ByteView nonce) {
  if (key.size() != 32) fail(Errc::kInvalidArgument, "AES-256 key must be 32 bytes");
  if (nonce.size() != kGcmNonceSize) fail(Errc::kInvalidArgument, "GCM nonce must be 12 bytes");
}

}  // namespace

Digest sha256(ByteView data) {
  Digest out{};
  SHA256(data.data(), data.size(), out.data());
  return out;
}

std::string sha256_hex(ByteView data) { return hex_encode(sha256(data)); }

Digest hmac_sha256(ByteView key, ByteView data) {
  Digest out{};
  unsigned int len = 0;
  // HMAC() rejects a null key pointer even for zero length.
  static const std::uint8_t kEmpty = 0;
  const std::uint8_t* key_ptr = key.empty() ? &kEmpty : key.data();
  if (HMAC(EVP_sha256(), key_ptr, static_cast<int>(key.size()), data.data(),
           data.size(), out.data(), &len) == nullptr) {
    fail(Errc::kInternal, "HMAC-SHA256 failed");
  }
  return out;
}

std::string hex_encode(ByteView data) {
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out += kHexDigits[b >> 4];
    out += kHexDigits[b & 0xF];
  }
  return out;
}

bool constant_time_equal(ByteView a, ByteView b) {
  if (a.size() != b.size()) return false;
  std::uint8_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff |= a[i] ^ b[i];
  return diff == 0;
}

Bytes random_bytes(std::size_t n) {
  Bytes out(n);
  if (n > 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1) {
    fail(Errc::kInternal, "RAND_bytes failed");
  }
  return out;
}

std::string base64_encode(ByteView data) { return encode_base64(data, kB64, true); }

std::optional<Bytes> base64_decode(std::string_view text) {
  std::string compact;
  compact.reserve(text.size());
  for (char c : text) {
    if (c == '\n' || c == '\r' || c == ' ' || c == '\t') continue;
    compact += c;
  }
  if (compact.size() % 4 != 0) return std::nullopt;
  std::size_t pad = 0;
  while (pad < 2 && !compact.empty() && compact.back() == '=') {
    compact.pop_back();
    ++pad;
  }
  return decode_unpadded(compact, false);
}

std::string base64url_encode(ByteView data) { return encode_base64(data, kB64Url, false); }

std::optional<Bytes> base64url_decode(std::string_view text) {
  return decode_unpadded(text, true);
}

Bytes aes256gcm_encrypt(ByteView key, ByteView nonce, ByteView plaintext,
                        ByteView aad) {
  check_gcm_params(key, nonce);
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) fail(Errc::kInternal, "EVP_CIPHER_CTX_new failed");
  int len = 0;
  Bytes out(plaintext.size() + kGcmTagSize);
  bool ok = EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kGcmNonceSize, nullptr) == 1 &&
            EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) == 1;
  if (ok && !aad.empty()) {
    ok = EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) == 1;
  }
  int total = 0;
  if (ok && !plaintext.empty()) {
    ok = EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                           static_cast<int>(plaintext.size())) == 1;
    total = len;
  }
  if (ok) {
    ok = EVP_EncryptFinal_ex(ctx.get(), out.data() + total, &len) == 1;
    total += len;
  }
  if (ok) {
    ok = EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kGcmTagSize,
                             out.data() + total) == 1;
  }
  if (!ok) fail(Errc::kInternal, "AES-256-GCM encryption failed");
  out.resize(static_cast<std::size_t>(total) + kGcmTagSize);
  return out;
}

std::optional<Bytes> aes256gcm_decrypt(ByteView key, ByteView nonce,
                                       ByteView ciphertext_and_tag,
                                       ByteView aad) {
  check_gcm_params(key, nonce);
  if (ciphertext_and_tag.size() < kGcmTagSize) return std::nullopt;
  const std::size_t body = ciphertext_and_tag.size() - kGcmTagSize;
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) fail(Errc::kInternal, "EVP_CIPHER_CTX_new failed");
  Bytes out(body + 16);
  int len = 0;
  bool ok = EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) == 1 &&
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, kGcmNonceSize, nullptr) == 1 &&
            EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.data(), nonce.data()) == 1;
  if (ok && !aad.empty()) {
    ok = EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) == 1;
  }
  int total = 0;
  if (ok && body > 0) {
    ok = EVP_DecryptUpdate(ctx.get(), out.data(), &len, ciphertext_and_tag.data(),
                           static_cast<int>(body)) == 1;
    total = len;
  }
  Bytes tag(ciphertext_and_tag.begin() + static_cast<std::ptrdiff_t>(body),
            ciphertext_and_tag.end());
  if (ok) {
    ok = EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kGcmTagSize, tag.data()) == 1;
  }
  if (ok) ok = EVP_DecryptFinal_ex(ctx.get(), out.data() + total, &len) == 1;
  if (!ok) {
    std::fill(out.begin(), out.end(), 0);
    return std::nullopt;
  }
  out.resize(static_cast<std::size_t>(total + len));
  return out;
}

}  // namespace mlpod
