/*
 * package.hpp
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
#include <string>

#include "mlpod/common/crypto.hpp"
#include "mlpod/model/adapter.hpp"

namespace mlpod::model {

inline constexpr int kPackageFormatVersion = 1;

struct PackageHeader {
  int format_version = kPackageFormatVersion;
  std::string model_name;
  int model_version = 0;
  std::int64_t created_at = 0;

  bool operator==(const PackageHeader&) const = default;
};

// Edge package layout:
//   [u32 BE header length][header JSON][12-byte nonce][ciphertext || GCM tag][32-byte HMAC]
// The ciphertext is AES-256-GCM over the manifest's canonical JSON with the
// header bytes as associated data; the HMAC covers every preceding byte.
// Encryption and MAC keys are derived from the shared edge key.
Bytes seal_package(const ModelManifest& manifest, ByteView edge_key, std::int64_t created_at);
Bytes seal_package(const PackageHeader& header, const ModelManifest& manifest, ByteView edge_key);

struct OpenedPackage {
  PackageHeader header;
  ModelManifest manifest;
};

// Checks framing and the HMAC before looking at the header, then the
// format version, then decrypts. Errors: Errc::kBadSignature,
// Errc::kUnsupportedFormat, Errc::kDecryptFailure.
OpenedPackage open_package(ByteView package, ByteView edge_key);

inline constexpr std::size_t kMinEdgeKeyBytes = 32;

}  // namespace mlpod::model
