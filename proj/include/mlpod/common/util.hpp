/*
 * util.hpp
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
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include "mlpod/common/crypto.hpp"

namespace mlpod {

// Seconds since the Unix epoch. Services take a Clock so tests can pin time.
using Clock = std::function<std::int64_t()>;
std::int64_t unix_now();
Clock system_clock();
std::int64_t unix_now_ms();

// 26-character Crockford base32 ULID: 48-bit millisecond time + 80 random bits.
std::string new_ulid();

// [A-Za-z0-9._-]{1,128}
bool is_valid_object_id(std::string_view id);

Bytes read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames it over `path`, so concurrent
// readers observe either the previous content or the new content.
void write_file_atomic(const std::filesystem::path& path, ByteView data);

std::string env_or(const char* name, std::string_view fallback);
// Loads a base64 key from the named environment variable and enforces a
// minimum length.
Bytes key_from_env(const char* name, std::size_t min_bytes);
Bytes decode_key(std::string_view base64_text, std::size_t min_bytes,
                 std::string_view what);

}  // namespace mlpod
