/*
 * anchor_doc.hpp
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

#include <string>
#include <string_view>

#include "mlpod/anchor/engine.hpp"

namespace mlpod::data {

struct Provenance {
  std::string model_name;
  std::string model_version;
  std::string created_at;

  bool operator==(const Provenance&) const = default;
};

// The shareable anchor-set file:
//   {name, L, M, metric, anchors: [{id, label, centroid, radius,
//    slice_features, representative_images}], provenance: {...}}
struct AnchorSetDocument {
  anchor::AnchorSet set;
  Provenance provenance;

  bool operator==(const AnchorSetDocument&) const = default;
};

// Errors: Errc::kParseError for malformed JSON, Errc::kValidationError with a
// field path ("anchors[1].radius: must be >= 0") for schema or invariant
// violations.
AnchorSetDocument parse_anchor_set_document(std::string_view json_text);
std::string serialize_anchor_set_document(const AnchorSetDocument& doc);

}  // namespace mlpod::data
