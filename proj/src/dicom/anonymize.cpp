/*
 * anonymize.cpp
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

#include "mlpod/dicom/anonymize.hpp"

#include "json.hpp"
#include "mlpod/common/error.hpp"

namespace mlpod::dicom {
namespace {

using Json = nlohmann::json;

std::string decimal_u128(unsigned __int128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v > 0) {
    out += static_cast<char>('0' + static_cast<int>(v % 10));
    v /= 10;
  }
  return {out.rbegin(), out.rend()};
}

class Anonymizer {
 public:
  explicit Anonymizer(const AnonymizationProfile& profile) : profile_(profile) {}

  void apply(std::vector<Element>& elements) {
    std::vector<Element> kept;
    kept.reserve(elements.size());
    for (auto& e : elements) {
      auto it = profile_.actions.find(e.tag);
      if (it == profile_.actions.end()) {
        for (auto& item : e.items) apply(item.elements);
        kept.push_back(std::move(e));
        continue;
      }
      switch (it->second) {
        case Action::kRemove:
          continue;
        case Action::kBlank:
          e.value.clear();
          e.items.clear();
          break;
        case Action::kPseudonym:
          if (e.sequence) {
            e.items.clear();
          } else {
            const std::string original = e.string_value();
            const std::string replacement = pseudonym(original, profile_.salt);
            map_.entries[sha256_hex(as_bytes(original))] = replacement;
            e.value = padded_text(vr_of(e), replacement);
          }
          break;
        case Action::kUidRemap:
          if (e.sequence) {
            e.items.clear();
          } else {
            e.value = padded_text("UI", remap_value(e.string_value()));
          }
          break;
      }
      kept.push_back(std::move(e));
    }
    elements = std::move(kept);
  }

  // Multi-valued UIDs are remapped component-wise; a malformed UID cannot be
  // remapped faithfully and is blanked instead.
  std::string remap_value(const std::string& value) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
      const auto end = value.find('\\', pos);
      const std::string part = value.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
      if (!is_valid_uid(part)) return {};
      const std::string mapped = remap_uid(part, profile_.salt);
      map_.entries[sha256_hex(as_bytes(part))] = mapped;
      out += mapped;
      if (end == std::string::npos) break;
      out += '\\';
      pos = end + 1;
    }
    return out;
  }

  PseudonymMap take_map() { return std::move(map_); }

 private:
  static std::string vr_of(const Element& e) {
    if (!e.vr.empty()) return e.vr;
    auto vr = dictionary_vr(e.tag);
    return vr ? std::string(*vr) : "LO";
  }

  const AnonymizationProfile& profile_;
  PseudonymMap map_;
};

}  // namespace

std::string_view action_name(Action a) {
  switch (a) {
    case Action::kRemove: return "REMOVE";
    case Action::kBlank: return "BLANK";
    case Action::kPseudonym: return "PSEUDONYM";
    case Action::kUidRemap: return "UID_REMAP";
  }
  return "REMOVE";
}

std::optional<Action> parse_action(std::string_view text) {
  if (text == "REMOVE") return Action::kRemove;
  if (text == "BLANK") return Action::kBlank;
  if (text == "PSEUDONYM") return Action::kPseudonym;
  if (text == "UID_REMAP") return Action::kUidRemap;
  return std::nullopt;
}

AnonymizationProfile AnonymizationProfile::from_json(std::string_view text) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) fail(Errc::kParseError, "profile is not a JSON object");
  AnonymizationProfile profile;
  if (!doc.contains("salt_b64") || !doc["salt_b64"].is_string()) {
    fail(Errc::kValidationError, "salt_b64: required string");
  }
  auto salt = base64_decode(doc["salt_b64"].get<std::string>());
  if (!salt) fail(Errc::kValidationError, "salt_b64: not valid base64");
  profile.salt = std::move(*salt);
  if (!doc.contains("actions") || !doc["actions"].is_array()) {
    fail(Errc::kValidationError, "actions: required array");
  }
  std::size_t i = 0;
  for (const auto& entry : doc["actions"]) {
    const std::string at = "actions[" + std::to_string(i++) + "]";
    if (!entry.is_object() || !entry.contains("tag") || !entry["tag"].is_string() ||
        !entry.contains("action") || !entry["action"].is_string()) {
      fail(Errc::kValidationError, at + ": needs string fields tag and action");
    }
    auto tag = Tag::parse(entry["tag"].get<std::string>());
    if (!tag) fail(Errc::kValidationError, at + ".tag: expected GGGG,EEEE");
    if (*tag == tags::kPixelData) fail(Errc::kValidationError, at + ".tag: PixelData cannot be anonymized");
    auto action = parse_action(entry["action"].get<std::string>());
    if (!action) fail(Errc::kValidationError, at + ".action: unknown action");
    profile.actions[*tag] = *action;
  }
  return profile;
}

std::string AnonymizationProfile::to_json() const {
  Json doc;
  doc["salt_b64"] = base64_encode(salt);
  doc["actions"] = Json::array();
  for (const auto& [tag, action] : actions) {
    std::string t = tag.str();
    doc["actions"].push_back({{"tag", t.substr(1, 9)}, {"action", action_name(action)}});
  }
  return doc.dump(2);
}

AnonymizationProfile AnonymizationProfile::defaults(Bytes salt) {
  AnonymizationProfile p;
  p.salt = std::move(salt);
  for (Tag t : {tags::kPatientBirthDate, tags::kPatientAddress, tags::kOtherPatientIds,
                tags::kReferringPhysicianName, tags::kInstitutionName, tags::kPatientName}) {
    p.actions[t] = Action::kRemove;
  }
  p.actions[tags::kPatientId] = Action::kPseudonym;
  p.actions[tags::kAccessionNumber] = Action::kPseudonym;
  p.actions[tags::kStudyInstanceUid] = Action::kUidRemap;
  p.actions[tags::kSeriesInstanceUid] = Action::kUidRemap;
  p.actions[tags::kSopInstanceUid] = Action::kUidRemap;
  return p;
}

void PseudonymMap::merge(const PseudonymMap& other) {
  entries.insert(other.entries.begin(), other.entries.end());
}

std::string PseudonymMap::to_json() const {
  Json doc = Json::object();
  doc["entries"] = entries;
  return doc.dump(2);
}

std::string pseudonym(std::string_view value, ByteView salt) {
  const Digest mac = hmac_sha256(salt, as_bytes(value));
  return "ANON-" + hex_encode(mac).substr(0, 12);
}

bool is_valid_uid(std::string_view uid) {
  if (uid.empty() || uid.size() > 64) return false;
  std::size_t start = 0;
  while (true) {
    const auto dot = uid.find('.', start);
    const auto part = uid.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (part.empty()) return false;
    for (char c : part) {
      if (c < '0' || c > '9') return false;
    }
    if (part.size() > 1 && part[0] == '0') return false;
    if (dot == std::string_view::npos) return true;
    start = dot + 1;
  }
}

std::string remap_uid(std::string_view uid, ByteView salt) {
  if (!is_valid_uid(uid)) fail(Errc::kValidationError, "malformed UID '" + std::string(uid) + "'");
  Bytes input(salt.begin(), salt.end());
  input.insert(input.end(), uid.begin(), uid.end());
  const Digest d = sha256(input);
  unsigned __int128 n = 0;
  for (int i = 0; i < 16; ++i) n = (n << 8) | d[static_cast<std::size_t>(i)];
  return "2.25." + decimal_u128(n);
}

AnonymizationResult anonymize(const DicomObject& obj, const AnonymizationProfile& profile) {
  AnonymizationResult result{obj, {}};
  Anonymizer anonymizer(profile);
  anonymizer.apply(result.anon.dataset);

  auto sop = profile.actions.find(tags::kSopInstanceUid);
  if (sop != profile.actions.end() && sop->second == Action::kUidRemap) {
    Element* media = result.anon.find(tags::kMediaStorageSopInstanceUid);
    if (media != nullptr) {
      media->value = padded_text("UI", anonymizer.remap_value(media->string_value()));
      result.anon.update_meta_group_length();
    }
  }
  result.map = anonymizer.take_map();
  return result;
}

}  // namespace mlpod::dicom
