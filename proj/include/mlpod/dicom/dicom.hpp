/*
 * dicom.hpp
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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlpod/common/crypto.hpp"

namespace mlpod::dicom {

struct Tag {
  std::uint16_t group = 0;
  std::uint16_t element = 0;

  constexpr auto operator<=>(const Tag&) const = default;
  constexpr std::uint32_t key() const {
    return (static_cast<std::uint32_t>(group) << 16) | element;
  }
  // Canonical "(GGGG,EEEE)", uppercase hex.
  std::string str() const;
  // Accepts "GGGG,EEEE" with or without surrounding parentheses.
  static std::optional<Tag> parse(std::string_view text);
};

namespace tags {
inline constexpr Tag kFileMetaGroupLength{0x0002, 0x0000};
inline constexpr Tag kFileMetaVersion{0x0002, 0x0001};
inline constexpr Tag kMediaStorageSopClassUid{0x0002, 0x0002};
inline constexpr Tag kMediaStorageSopInstanceUid{0x0002, 0x0003};
inline constexpr Tag kTransferSyntaxUid{0x0002, 0x0010};
inline constexpr Tag kImplementationClassUid{0x0002, 0x0012};
inline constexpr Tag kSopClassUid{0x0008, 0x0016};
inline constexpr Tag kSopInstanceUid{0x0008, 0x0018};
inline constexpr Tag kStudyDate{0x0008, 0x0020};
inline constexpr Tag kAccessionNumber{0x0008, 0x0050};
inline constexpr Tag kModality{0x0008, 0x0060};
inline constexpr Tag kInstitutionName{0x0008, 0x0080};
inline constexpr Tag kReferringPhysicianName{0x0008, 0x0090};
inline constexpr Tag kReferencedStudySequence{0x0008, 0x1110};
inline constexpr Tag kReferencedSeriesSequence{0x0008, 0x1115};
inline constexpr Tag kReferencedSopInstanceUid{0x0008, 0x1155};
inline constexpr Tag kPatientName{0x0010, 0x0010};
inline constexpr Tag kPatientId{0x0010, 0x0020};
inline constexpr Tag kPatientBirthDate{0x0010, 0x0030};
inline constexpr Tag kOtherPatientIds{0x0010, 0x1000};
inline constexpr Tag kPatientAddress{0x0010, 0x1040};
inline constexpr Tag kStudyInstanceUid{0x0020, 0x000D};
inline constexpr Tag kSeriesInstanceUid{0x0020, 0x000E};
inline constexpr Tag kInstanceNumber{0x0020, 0x0013};
inline constexpr Tag kSamplesPerPixel{0x0028, 0x0002};
inline constexpr Tag kPhotometricInterpretation{0x0028, 0x0004};
inline constexpr Tag kRows{0x0028, 0x0010};
inline constexpr Tag kColumns{0x0028, 0x0011};
inline constexpr Tag kBitsAllocated{0x0028, 0x0100};
inline constexpr Tag kBitsStored{0x0028, 0x0101};
inline constexpr Tag kHighBit{0x0028, 0x0102};
inline constexpr Tag kPixelRepresentation{0x0028, 0x0103};
inline constexpr Tag kPixelData{0x7FE0, 0x0010};
inline constexpr Tag kItem{0xFFFE, 0xE000};
inline constexpr Tag kItemDelimitation{0xFFFE, 0xE00D};
inline constexpr Tag kSequenceDelimitation{0xFFFE, 0xE0DD};
}  // namespace tags

inline constexpr std::string_view kImplicitVrLittleEndian = "1.2.840.10008.1.2";
inline constexpr std::string_view kExplicitVrLittleEndian = "1.2.840.10008.1.2.1";

// Dictionary lookups for the handful of attributes this toolkit knows by
// name. Unknown tags return nullopt.
std::optional<std::string_view> dictionary_vr(Tag tag);
std::optional<std::string_view> dictionary_keyword(Tag tag);

bool is_supported_vr(std::string_view vr);

struct Element;

struct Item {
  std::vector<Element> elements;
  bool undefined_length = false;

  bool operator==(const Item&) const;
};

struct Element {
  Tag tag;
  std::string vr;  // empty when read from an implicit-VR stream
  Bytes value;     // raw value bytes, padding included; unused for sequences
  std::vector<Item> items;
  bool sequence = false;
  bool undefined_length = false;  // sequences only

  // Value as text with trailing space/NUL padding removed.
  std::string string_value() const;
  bool operator==(const Element&) const = default;
};

struct DicomObject {
  Bytes preamble = Bytes(128, 0);
  std::vector<Element> meta;
  std::vector<Element> dataset;
  std::string transfer_syntax{kExplicitVrLittleEndian};

  bool explicit_vr() const { return transfer_syntax == kExplicitVrLittleEndian; }

  const Element* find(Tag tag) const;
  Element* find(Tag tag);
  std::optional<std::string> get_string(Tag tag) const;
  std::optional<std::uint16_t> get_u16(Tag tag) const;

  // Inserts or replaces a dataset (or, for group 0002, meta) element, keeping
  // tag order. Text values are padded to even length with the VR's pad byte.
  void set_string(Tag tag, std::string_view vr, std::string_view text);
  void set_u16(Tag tag, std::uint16_t value);
  void set_bytes(Tag tag, std::string_view vr, Bytes value);
  bool erase(Tag tag);

  // Rewrites (0002,0000) to match the encoded size of the remaining meta
  // elements. No-op when the element is absent.
  void update_meta_group_length();

  bool operator==(const DicomObject&) const = default;
};

// Pads text to even length: NUL for UI, space for other text VRs.
Bytes padded_text(std::string_view vr, std::string_view text);

// Errors: Errc::kParseError with the byte offset in the message, or
// Errc::kUnsupportedFormat for transfer syntaxes other than implicit/explicit
// VR little endian.
DicomObject parse_dicom(ByteView bytes);

// Errors: Errc::kSerializeError for out-of-order tags or odd-length values
// whose VR has no pad rule.
Bytes serialize_dicom(const DicomObject& obj);

// Human-readable listing, one element per line, nested items indented.
std::string dump(const DicomObject& obj);

}  // namespace mlpod::dicom
