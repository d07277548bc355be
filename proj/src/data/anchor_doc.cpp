/*
 * anchor_doc.cpp
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

#include "mlpod/data/anchor_doc.hpp"

#include "json.hpp"
#include "mlpod/common/error.hpp"
#include "mlpod/common/util.hpp"

namespace mlpod::data {
namespace {

using Json = nlohmann::json;

[[noreturn]] void invalid(const std::string& path, const std::string& why) {
  fail(Errc::kValidationError, path + ": " + why);
}

const Json& field(const Json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) invalid(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) invalid(path, "expected a string");
  return v.get<std::string>();
}

// Versions and timestamps may arrive as numbers or strings.
std::string as_text(const Json& v, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  invalid(path, "expected a string or integer");
}

std::size_t as_count(const Json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    invalid(path, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

double as_double(const Json& v, const std::string& path) {
  if (!v.is_number()) invalid(path, "expected a number");
  return v.get<double>();
}

anchor::Vector as_vector(const Json& v, const std::string& path) {
  if (!v.is_array()) invalid(path, "expected an array of numbers");
  anchor::Vector out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_double(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

const Json& as_array(const Json& v, const std::string& path) {
  if (!v.is_array()) invalid(path, "expected an array");
  return v;
}

anchor::Anchor parse_anchor(const Json& j, const std::string& at) {
  if (!j.is_object()) invalid(at, "expected an object");
  anchor::Anchor a;
  a.id = as_string(field(j, at, "id"), join(at, "id"));
  const std::string label = as_string(field(j, at, "label"), join(at, "label"));
  auto parsed = anchor::parse_label(label);
  if (!parsed) invalid(join(at, "label"), "must be \"covid\" or \"non-covid\"");
  a.label = *parsed;
  a.centroid = as_vector(field(j, at, "centroid"), join(at, "centroid"));
  a.radius = as_double(field(j, at, "radius"), join(at, "radius"));
  if (auto it = j.find("slice_features"); it != j.end()) {
    const std::string sp = join(at, "slice_features");
    const Json& rows = as_array(*it, sp);
    for (std::size_t s = 0; s < rows.size(); ++s) {
      a.slice_features.push_back(as_vector(rows[s], sp + "[" + std::to_string(s) + "]"));
    }
  }
  if (auto it = j.find("representative_images"); it != j.end()) {
    const std::string ip = join(at, "representative_images");
    const Json& refs = as_array(*it, ip);
    for (std::size_t r = 0; r < refs.size(); ++r) {
      const std::string rp = ip + "[" + std::to_string(r) + "]";
      std::string ref = as_string(refs[r], rp);
      if (!is_valid_object_id(ref)) invalid(rp, "not a valid object id");
      a.representative_images.push_back(std::move(ref));
    }
  }
  return a;
}

}  // namespace

AnchorSetDocument parse_anchor_set_document(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    fail(Errc::kParseError, std::string("anchor set is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) invalid("$", "expected an object");

  AnchorSetDocument doc;
  auto& set = doc.set;
  set.name = as_string(field(j, "", "name"), "name");
  set.dim = as_count(field(j, "", "L"), "L");
  const std::size_t m = as_count(field(j, "", "M"), "M");
  set.metric = as_string(field(j, "", "metric"), "metric");
  const Json& anchors = as_array(field(j, "", "anchors"), "anchors");
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    set.anchors.push_back(parse_anchor(anchors[k], "anchors[" + std::to_string(k) + "]"));
  }
  if (m != set.anchors.size()) {
    invalid("M", "declares " + std::to_string(m) + " anchors but " +
                     std::to_string(set.anchors.size()) + " are present");
  }
  set.validate();

  const Json& prov = field(j, "", "provenance");
  if (!prov.is_object()) invalid("provenance", "expected an object");
  doc.provenance.model_name =
      as_text(field(prov, "provenance", "model_name"), "provenance.model_name");
  doc.provenance.model_version =
      as_text(field(prov, "provenance", "model_version"), "provenance.model_version");
  doc.provenance.created_at =
      as_text(field(prov, "provenance", "created_at"), "provenance.created_at");
  if (doc.provenance.model_name.empty()) invalid("provenance.model_name", "must be non-empty");
  if (doc.provenance.model_version.empty()) {
    invalid("provenance.model_version", "must be non-empty");
  }
  if (doc.provenance.created_at.empty()) invalid("provenance.created_at", "must be non-empty");
  return doc;
}

std::string serialize_anchor_set_document(const AnchorSetDocument& doc) {
  Json anchors = Json::array();
  for (const auto& a : doc.set.anchors) {
    anchors.push_back({{"id", a.id},
                       {"label", anchor::label_name(a.label)},
                       {"centroid", a.centroid},
                       {"radius", a.radius},
                       {"slice_features", a.slice_features},
                       {"representative_images", a.representative_images}});
  }
  Json j = {{"name", doc.set.name},
            {"L", doc.set.dim},
            {"M", doc.set.anchors.size()},
            {"metric", doc.set.metric},
            {"anchors", std::move(anchors)},
            {"provenance",
             {{"model_name", doc.provenance.model_name},
              {"model_version", doc.provenance.model_version},
              {"created_at", doc.provenance.created_at}}}};
  return j.dump(2);
}

}  // namespace mlpod::data
