/*
 * datapod.cpp
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

#include "mlpod/data/datapod.hpp"

#include <algorithm>
#include <cstring>

#include "json.hpp"
#include "mlpod/common/error.hpp"

namespace mlpod::data {
namespace fs = std::filesystem;
namespace {

using Json = nlohmann::json;

void check_id(const std::string& id) {
  if (!is_valid_object_id(id)) fail(Errc::kInvalidId, "invalid object id: " + id);
}

Bytes encode_record(const std::string& meta, ByteView payload) {
  Bytes out(4);
  const auto n = static_cast<std::uint32_t>(meta.size());
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(n >> (8 * i));
  out.insert(out.end(), meta.begin(), meta.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

struct Record {
  Json meta;
  Bytes payload;
};

Record decode_record(const Bytes& raw, const std::string& id) {
  if (raw.size() < 4) fail(Errc::kIoError, "corrupt object record: " + id);
  std::uint32_t n = 0;
  for (int i = 0; i < 4; ++i) n |= static_cast<std::uint32_t>(raw[i]) << (8 * i);
  if (raw.size() - 4 < n) fail(Errc::kIoError, "corrupt object record: " + id);
  Record r;
  try {
    r.meta = Json::parse(raw.begin() + 4, raw.begin() + 4 + n);
  } catch (const Json::exception&) {
    fail(Errc::kIoError, "corrupt object metadata: " + id);
  }
  r.payload.assign(raw.begin() + 4 + n, raw.end());
  return r;
}

std::int64_t get_count(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return 0;
  if (!it->is_number_integer()) {
    fail(Errc::kValidationError, std::string(key) + ": expected an integer");
  }
  return it->get<std::int64_t>();
}

}  // namespace

DatasetManifest DatasetManifest::from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(Errc::kParseError, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(Errc::kValidationError, "$: expected an object");
  DatasetManifest m;
  m.name = j.value("name", "");
  m.covid_scans = get_count(j, "covid_scans");
  m.non_covid_scans = get_count(j, "non_covid_scans");
  m.covid_slices = get_count(j, "covid_slices");
  m.non_covid_slices = get_count(j, "non_covid_slices");
  if (j.contains("total_scans")) m.total_scans = get_count(j, "total_scans");
  if (j.contains("total_slices")) m.total_slices = get_count(j, "total_slices");
  return m;
}

std::string ManifestReport::to_json() const {
  return Json{{"ok", ok}, {"issues", issues}, {"total_scans", total_scans},
              {"total_slices", total_slices}}
      .dump();
}

ManifestReport validate_manifest(const DatasetManifest& m) {
  ManifestReport r;
  auto issue = [&r](std::string text) {
    r.ok = false;
    r.issues.push_back(std::move(text));
  };
  const std::pair<const char*, std::int64_t> counts[] = {
      {"covid_scans", m.covid_scans},
      {"non_covid_scans", m.non_covid_scans},
      {"covid_slices", m.covid_slices},
      {"non_covid_slices", m.non_covid_slices}};
  for (const auto& [name, value] : counts) {
    if (value < 0) issue(std::string(name) + " is negative");
  }
  r.total_scans = m.covid_scans + m.non_covid_scans;
  r.total_slices = m.covid_slices + m.non_covid_slices;
  if (m.total_scans && *m.total_scans != r.total_scans) {
    issue("scan counts sum to " + std::to_string(r.total_scans) + " but total_scans is " +
          std::to_string(*m.total_scans));
  }
  if (m.total_slices && *m.total_slices != r.total_slices) {
    issue("slice counts sum to " + std::to_string(r.total_slices) + " but total_slices is " +
          std::to_string(*m.total_slices));
  }
  if (m.covid_slices < m.covid_scans) issue("covid: slices fewer than scans");
  if (m.non_covid_slices < m.non_covid_scans) issue("non-covid: slices fewer than scans");
  return r;
}

DataPod::DataPod(fs::path root, Clock clock) : root_(std::move(root)), clock_(std::move(clock)) {
  fs::create_directories(root_ / "objects");
  fs::create_directories(root_ / "anchorsets");
}

std::shared_ptr<std::mutex> DataPod::lock_for(const std::string& key) {
  std::lock_guard<std::mutex> guard(locks_mutex_);
  auto& slot = locks_[key];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

PutResult DataPod::put_object(const std::string& id, ByteView bytes,
                              const std::string& media_type, const auth::Claims& claims) {
  auth::require_scope(claims, auth::scope::kDataWrite);
  check_id(id);
  if (auto max = claims.limits().max_input_bytes; max && bytes.size() > *max) {
    fail(Errc::kPayloadTooLarge, "object of " + std::to_string(bytes.size()) +
                                     " bytes exceeds the token limit of " +
                                     std::to_string(*max));
  }
  PutResult result{id, sha256_hex(bytes)};
  const Json meta = {{"media_type", media_type.empty() ? "application/octet-stream" : media_type},
                     {"content_hash", result.content_hash},
                     {"created_at", clock_()}};
  const Bytes record = encode_record(meta.dump(), bytes);
  auto lock = lock_for("object:" + id);
  std::lock_guard<std::mutex> guard(*lock);
  write_file_atomic(root_ / "objects" / id, record);
  return result;
}

StoredObject DataPod::get_object(const std::string& id, const auth::Claims& claims) const {
  auth::require_scope(claims, auth::scope::kDataRead);
  check_id(id);
  const fs::path path = root_ / "objects" / id;
  Bytes raw;
  try {
    raw = read_file(path);
  } catch (const Error& e) {
    if (!fs::exists(path)) fail(Errc::kNotFound, "no object with id " + id);
    throw;
  }
  Record r = decode_record(raw, id);
  StoredObject obj;
  obj.id = id;
  obj.bytes = std::move(r.payload);
  obj.content_hash = r.meta.value("content_hash", "");
  obj.media_type = r.meta.value("media_type", "application/octet-stream");
  obj.created_at = r.meta.value("created_at", std::int64_t{0});
  if (obj.content_hash != sha256_hex(obj.bytes)) {
    fail(Errc::kIoError, "stored object " + id + " does not match its content hash");
  }
  return obj;
}

std::vector<ObjectInfo> DataPod::list_objects(const std::string& prefix,
                                              const auth::Claims& claims) const {
  auth::require_scope(claims, auth::scope::kDataRead);
  std::vector<ObjectInfo> out;
  for (const auto& entry : fs::directory_iterator(root_ / "objects")) {
    const std::string id = entry.path().filename().string();
    if (!entry.is_regular_file() || !is_valid_object_id(id)) continue;
    if (id.compare(0, prefix.size(), prefix) != 0) continue;
    Bytes raw;
    try {
      raw = read_file(entry.path());
    } catch (const Error&) {
      continue;
    }
    Record r = decode_record(raw, id);
    out.push_back({id, r.meta.value("content_hash", ""),
                   r.meta.value("media_type", "application/octet-stream"), r.payload.size()});
  }
  std::sort(out.begin(), out.end(),
            [](const ObjectInfo& a, const ObjectInfo& b) { return a.id < b.id; });
  return out;
}

std::vector<int> DataPod::versions_of(const std::string& name) const {
  std::vector<int> versions;
  const fs::path dir = root_ / "anchorsets" / name;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    const fs::path p = entry.path();
    if (p.extension() != ".json") continue;
    const std::string stem = p.stem().string();
    if (stem.empty() || !std::all_of(stem.begin(), stem.end(), ::isdigit)) continue;
    versions.push_back(std::stoi(stem));
  }
  std::sort(versions.begin(), versions.end());
  return versions;
}

int DataPod::put_anchor_set(const std::string& name, std::string_view json_text,
                            const auth::Claims& claims) {
  auth::require_scope(claims, auth::scope::kDataWrite);
  check_id(name);
  if (auto max = claims.limits().max_input_bytes; max && json_text.size() > *max) {
    fail(Errc::kPayloadTooLarge, "anchor set exceeds the token's max_input_bytes");
  }
  const AnchorSetDocument doc = parse_anchor_set_document(json_text);
  if (doc.set.name != name) {
    fail(Errc::kValidationError, "name: document names \"" + doc.set.name +
                                     "\" but was submitted as \"" + name + "\"");
  }
  auto lock = lock_for("anchorset:" + name);
  std::lock_guard<std::mutex> guard(*lock);
  const auto versions = versions_of(name);
  const int next = versions.empty() ? 1 : versions.back() + 1;
  const fs::path dir = root_ / "anchorsets" / name;
  fs::create_directories(dir);
  write_file_atomic(dir / (std::to_string(next) + ".json"), as_bytes(json_text));
  return next;
}

StoredAnchorSet DataPod::get_anchor_set(const std::string& name, std::optional<int> version,
                                        const auth::Claims& claims) const {
  auth::require_scope(claims, auth::scope::kDataRead);
  check_id(name);
  const auto versions = versions_of(name);
  if (versions.empty()) fail(Errc::kNotFound, "no anchor set named " + name);
  const int v = version.value_or(versions.back());
  if (!std::binary_search(versions.begin(), versions.end(), v)) {
    fail(Errc::kNotFound, "anchor set " + name + " has no version " + std::to_string(v));
  }
  return {v, read_text_file(root_ / "anchorsets" / name / (std::to_string(v) + ".json"))};
}

}  // namespace mlpod::data
