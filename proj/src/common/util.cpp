/*
 * util.cpp
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

#include "mlpod/common/util.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <system_error>

#include "mlpod/common/error.hpp"

namespace mlpod {

std::int64_t unix_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::int64_t unix_now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

Clock system_clock() { return [] { return unix_now(); }; }

std::string new_ulid() {
  static constexpr char kCrockford[] = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";
  const auto ms = static_cast<std::uint64_t>(unix_now_ms());
  const Bytes rnd = random_bytes(10);
  std::string out(26, '0');
  // 10 chars of time (50 bits, top 2 always zero for 48-bit time).
  std::uint64_t t = ms;
  for (int i = 9; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kCrockford[t & 31];
    t >>= 5;
  }
  // 16 chars of randomness (80 bits).
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;
  for (int i = 0; i < 5; ++i) hi = (hi << 8) | rnd[static_cast<std::size_t>(i)];
  for (int i = 5; i < 10; ++i) lo = (lo << 8) | rnd[static_cast<std::size_t>(i)];
  for (int i = 7; i >= 0; --i) {
    out[static_cast<std::size_t>(10 + i)] = kCrockford[hi & 31];
    hi >>= 5;
    out[static_cast<std::size_t>(18 + i)] = kCrockford[lo & 31];
    lo >>= 5;
  }
  return out;
}

bool is_valid_object_id(std::string_view id) {
  if (id.empty() || id.size() > 128) return false;
  for (char c : id) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    if (!ok) return false;
  }
  // "." and ".." would escape the store directory.
  return id != "." && id != "..";
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kIoError, "cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(Errc::kIoError, "read failed for " + path.string());
  return data;
}

std::string read_text_file(const std::filesystem::path& path) {
  Bytes data = read_file(path);
  return {data.begin(), data.end()};
}

void write_file_atomic(const std::filesystem::path& path, ByteView data) {
  static std::atomic<std::uint64_t> counter{0};
  std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(unix_now_ms()) + "-" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::kIoError, "cannot create " + tmp.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) fail(Errc::kIoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(Errc::kIoError, "rename failed for " + path.string());
  }
}

std::string env_or(const char* name, std::string_view fallback) {
  const char* v = std::getenv(name);
  return v != nullptr ? std::string(v) : std::string(fallback);
}

Bytes decode_key(std::string_view base64_text, std::size_t min_bytes,
                 std::string_view what) {
  auto key = base64_decode(base64_text);
  if (!key) fail(Errc::kInvalidArgument, std::string(what) + " is not valid base64");
  if (key->size() < min_bytes) {
    fail(Errc::kInvalidArgument, std::string(what) + " must decode to at least " +
                                     std::to_string(min_bytes) + " bytes");
  }
  return *key;
}

Bytes key_from_env(const char* name, std::size_t min_bytes) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') {
    fail(Errc::kInvalidArgument, std::string(name) + " is not set");
  }
  return decode_key(v, min_bytes, name);
}

}  // namespace mlpod
