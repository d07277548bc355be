/*
 * datapod.hpp
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
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mlpod/auth/token.hpp"
#include "mlpod/common/util.hpp"
#include "mlpod/data/anchor_doc.hpp"

namespace mlpod::data {

struct StoredObject {
  std::string id;
  Bytes bytes;
  std::string content_hash;  // SHA-256 hex of bytes
  std::string media_type;
  std::int64_t created_at = 0;
};

struct PutResult {
  std::string id;
  std::string content_hash;
};

struct ObjectInfo {
  std::string id;
  std::string content_hash;
  std::string media_type;
  std::uint64_t size = 0;
};

struct StoredAnchorSet {
  int version = 0;
  std::string json;  // the document exactly as it was submitted
};

struct DatasetManifest {
  std::string name;
  std::int64_t covid_scans = 0;
  std::int64_t non_covid_scans = 0;
  std::int64_t covid_slices = 0;
  std::int64_t non_covid_slices = 0;
  std::optional<std::int64_t> total_scans;
  std::optional<std::int64_t> total_slices;

  static DatasetManifest from_json(std::string_view text);
};

struct ManifestReport {
  bool ok = true;
  std::vector<std::string> issues;
  std::int64_t total_scans = 0;
  std::int64_t total_slices = 0;

  std::string to_json() const;
};

ManifestReport validate_manifest(const DatasetManifest& m);

// Filesystem-backed object and anchor-set store. Layout under root:
//   objects/<id>                 [u32 LE meta length][meta JSON][payload]
//   anchorsets/<name>/<v>.json   submitted document bytes
// Every commit is a temp-file write followed by rename.
class DataPod {
 public:
  explicit DataPod(std::filesystem::path root, Clock clock = system_clock());

  PutResult put_object(const std::string& id, ByteView bytes, const std::string& media_type,
                       const auth::Claims& claims);
  StoredObject get_object(const std::string& id, const auth::Claims& claims) const;
  // Ids starting with `prefix`, sorted.
  std::vector<ObjectInfo> list_objects(const std::string& prefix,
                                       const auth::Claims& claims) const;

  int put_anchor_set(const std::string& name, std::string_view json_text,
                     const auth::Claims& claims);
  // nullopt selects the latest version.
  StoredAnchorSet get_anchor_set(const std::string& name, std::optional<int> version,
                                 const auth::Claims& claims) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::shared_ptr<std::mutex> lock_for(const std::string& key);
  std::vector<int> versions_of(const std::string& name) const;

  std::filesystem::path root_;
  Clock clock_;
  std::mutex locks_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

}  // namespace mlpod::data
