/*
 * package.cpp
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

#include "mlpod/model/package.hpp"

#include "json.hpp"
#include "mlpod/common/error.hpp"

namespace mlpod::model {
namespace {

using Json = nlohmann::json;

constexpr std::size_t kMacSize = 32;

struct Keys {
  Digest enc;
  Digest mac;
};

Keys derive_keys(ByteView edge_key) {
  if (edge_key.size() < kMinEdgeKeyBytes) {
    fail(Errc::kInvalidArgument, "edge key must be at least 32 bytes");
  }
  return {hmac_sha256(edge_key, as_bytes("mlpod-edge-enc")),
          hmac_sha256(edge_key, as_bytes("mlpod-edge-mac"))};
}

std::string header_json(const PackageHeader& h) {
  return Json{{"format_version", h.format_version},
              {"model_name", h.model_name},
              {"model_version", h.model_version},
              {"created_at", h.created_at}}
      .dump();
}

[[noreturn]] void bad_signature() {
  fail(Errc::kBadSignature, "edge package failed signature verification");
}

}  // namespace

Bytes seal_package(const ModelManifest& manifest, ByteView edge_key, std::int64_t created_at) {
  PackageHeader h;
  h.model_name = manifest.name;
  h.model_version = manifest.version;
  h.created_at = created_at;
  return seal_package(h, manifest, edge_key);
}

Bytes seal_package(const PackageHeader& header, const ModelManifest& manifest,
                   ByteView edge_key) {
  const Keys keys = derive_keys(edge_key);
  const std::string hdr = header_json(header);
  const Bytes nonce = random_bytes(kGcmNonceSize);
  const Bytes ct = aes256gcm_encrypt(keys.enc, nonce, as_bytes(manifest.to_json()), as_bytes(hdr));

  Bytes out;
  out.reserve(4 + hdr.size() + nonce.size() + ct.size() + kMacSize);
  const auto n = static_cast<std::uint32_t>(hdr.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(n >> shift));
  out.insert(out.end(), hdr.begin(), hdr.end());
  out.insert(out.end(), nonce.begin(), nonce.end());
  out.insert(out.end(), ct.begin(), ct.end());
  const Digest mac = hmac_sha256(keys.mac, out);
  out.insert(out.end(), mac.begin(), mac.end());
  return out;
}

OpenedPackage open_package(ByteView package, ByteView edge_key) {
  const Keys keys = derive_keys(edge_key);
  if (package.size() < 4 + kGcmNonceSize + kGcmTagSize + kMacSize) bad_signature();
  const std::uint32_t hdr_len = (std::uint32_t{package[0]} << 24) |
                                (std::uint32_t{package[1]} << 16) |
                                (std::uint32_t{package[2]} << 8) | std::uint32_t{package[3]};
  if (hdr_len > package.size() - 4 - kGcmNonceSize - kGcmTagSize - kMacSize) bad_signature();

  const ByteView signed_part = package.first(package.size() - kMacSize);
  const Digest expected = hmac_sha256(keys.mac, signed_part);
  if (!constant_time_equal(expected, package.last(kMacSize))) bad_signature();

  const ByteView hdr = package.subspan(4, hdr_len);
  const ByteView nonce = package.subspan(4 + hdr_len, kGcmNonceSize);
  const ByteView ct = signed_part.subspan(4 + hdr_len + kGcmNonceSize);

  OpenedPackage opened;
  try {
    const Json h = Json::parse(hdr.begin(), hdr.end());
    opened.header.format_version = h.at("format_version").get<int>();
    if (opened.header.format_version != kPackageFormatVersion) {
      fail(Errc::kUnsupportedFormat, "unsupported edge package format_version " +
                                         std::to_string(opened.header.format_version));
    }
    opened.header.model_name = h.at("model_name").get<std::string>();
    opened.header.model_version = h.at("model_version").get<int>();
    opened.header.created_at = h.at("created_at").get<std::int64_t>();
  } catch (const Json::exception&) {
    fail(Errc::kUnsupportedFormat, "edge package header is not understood");
  }

  auto plain = aes256gcm_decrypt(keys.enc, nonce, ct, hdr);
  if (!plain) fail(Errc::kDecryptFailure, "edge package failed authenticated decryption");
  opened.manifest = ModelManifest::from_json(to_string(*plain));
  if (opened.manifest.name != opened.header.model_name ||
      opened.manifest.version != opened.header.model_version) {
    fail(Errc::kValidationError, "edge package header does not match its manifest");
  }
  return opened;
}

}  // namespace mlpod::model
