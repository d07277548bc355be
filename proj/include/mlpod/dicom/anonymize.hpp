/*
 * anonymize.hpp
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

#include <map>
#include <string>
#include <string_view>

#include "mlpod/dicom/dicom.hpp"

namespace mlpod::dicom {

enum class Action { kRemove, kBlank, kPseudonym, kUidRemap };

std::string_view action_name(Action a);
std::optional<Action> parse_action(std::string_view text);

struct AnonymizationProfile {
  std::map<Tag, Action> actions;
  Bytes salt;

  // Profile file: {"salt_b64": "...", "actions": [{"tag": "GGGG,EEEE", "action": "REMOVE"}]}
  // PixelData may not appear in the action table.
  static AnonymizationProfile from_json(std::string_view text);
  std::string to_json() const;

  // The built-in table: names, birth date, address, institution and
  // referring physician removed; IDs pseudonymised; study/series/instance
  // UIDs remapped.
  static AnonymizationProfile defaults(Bytes salt);
};

// Audit record of replacements: SHA-256 hex of the original value mapped to
// its replacement. Stays on the machine that ran the anonymizer.
struct PseudonymMap {
  std::map<std::string, std::string> entries;

  void merge(const PseudonymMap& other);
  std::string to_json() const;
  bool operator==(const PseudonymMap&) const = default;
};

struct AnonymizationResult {
  DicomObject anon;
  PseudonymMap map;
};

// Applies the profile to the dataset and, recursively, to sequence items.
// When SOPInstanceUID is remapped, MediaStorageSOPInstanceUID follows so the
// meta header keeps pointing at the same instance.
AnonymizationResult anonymize(const DicomObject& obj, const AnonymizationProfile& profile);

// "ANON-" + first 12 hex digits of HMAC-SHA256(salt, value).
std::string pseudonym(std::string_view value, ByteView salt);

// "2.25." + decimal value of the first 16 bytes of SHA-256(salt || uid).
// Errors: Errc::kValidationError for empty, over-long, or non dotted-decimal input.
std::string remap_uid(std::string_view uid, ByteView salt);
bool is_valid_uid(std::string_view uid);

}  // namespace mlpod::dicom
