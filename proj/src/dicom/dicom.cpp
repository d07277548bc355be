/*
 * dicom.cpp
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

#include "mlpod/dicom/dicom.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>

#include "mlpod/common/error.hpp"

namespace mlpod::dicom {
namespace {

constexpr std::uint32_t kUndefinedLength = 0xFFFFFFFF;
constexpr int kMaxNesting = 32;

struct DictEntry {
  Tag tag;
  std::string_view vr;
  std::string_view keyword;
};

constexpr std::array kDictionary = {
    DictEntry{tags::kFileMetaGroupLength, "UL", "FileMetaInformationGroupLength"},
    DictEntry{tags::kFileMetaVersion, "OB", "FileMetaInformationVersion"},
    DictEntry{tags::kMediaStorageSopClassUid, "UI", "MediaStorageSOPClassUID"},
    DictEntry{tags::kMediaStorageSopInstanceUid, "UI", "MediaStorageSOPInstanceUID"},
    DictEntry{tags::kTransferSyntaxUid, "UI", "TransferSyntaxUID"},
    DictEntry{tags::kImplementationClassUid, "UI", "ImplementationClassUID"},
    DictEntry{Tag{0x0002, 0x0013}, "SH", "ImplementationVersionName"},
    DictEntry{Tag{0x0008, 0x0005}, "CS", "SpecificCharacterSet"},
    DictEntry{Tag{0x0008, 0x0008}, "CS", "ImageType"},
    DictEntry{tags::kSopClassUid, "UI", "SOPClassUID"},
    DictEntry{tags::kSopInstanceUid, "UI", "SOPInstanceUID"},
    DictEntry{tags::kStudyDate, "DA", "StudyDate"},
    DictEntry{Tag{0x0008, 0x0030}, "TM", "StudyTime"},
    DictEntry{tags::kAccessionNumber, "SH", "AccessionNumber"},
    DictEntry{tags::kModality, "CS", "Modality"},
    DictEntry{tags::kInstitutionName, "LO", "InstitutionName"},
    DictEntry{tags::kReferringPhysicianName, "PN", "ReferringPhysicianName"},
    DictEntry{Tag{0x0008, 0x1030}, "LO", "StudyDescription"},
    DictEntry{Tag{0x0008, 0x103E}, "LO", "SeriesDescription"},
    DictEntry{tags::kReferencedStudySequence, "SQ", "ReferencedStudySequence"},
    DictEntry{tags::kReferencedSeriesSequence, "SQ", "ReferencedSeriesSequence"},
    DictEntry{Tag{0x0008, 0x1140}, "SQ", "ReferencedImageSequence"},
    DictEntry{Tag{0x0008, 0x1150}, "UI", "ReferencedSOPClassUID"},
    DictEntry{tags::kReferencedSopInstanceUid, "UI", "ReferencedSOPInstanceUID"},
    DictEntry{tags::kPatientName, "PN", "PatientName"},
    DictEntry{tags::kPatientId, "LO", "PatientID"},
    DictEntry{tags::kPatientBirthDate, "DA", "PatientBirthDate"},
    DictEntry{Tag{0x0010, 0x0040}, "CS", "PatientSex"},
    DictEntry{tags::kOtherPatientIds, "LO", "OtherPatientIDs"},
    DictEntry{Tag{0x0010, 0x1002}, "SQ", "OtherPatientIDsSequence"},
    DictEntry{tags::kPatientAddress, "LO", "PatientAddress"},
    DictEntry{Tag{0x0018, 0x0050}, "DS", "SliceThickness"},
    DictEntry{tags::kStudyInstanceUid, "UI", "StudyInstanceUID"},
    DictEntry{tags::kSeriesInstanceUid, "UI", "SeriesInstanceUID"},
    DictEntry{Tag{0x0020, 0x0011}, "IS", "SeriesNumber"},
    DictEntry{tags::kInstanceNumber, "IS", "InstanceNumber"},
    DictEntry{tags::kSamplesPerPixel, "US", "SamplesPerPixel"},
    DictEntry{tags::kPhotometricInterpretation, "CS", "PhotometricInterpretation"},
    DictEntry{tags::kRows, "US", "Rows"},
    DictEntry{tags::kColumns, "US", "Columns"},
    DictEntry{tags::kBitsAllocated, "US", "BitsAllocated"},
    DictEntry{tags::kBitsStored, "US", "BitsStored"},
    DictEntry{tags::kHighBit, "US", "HighBit"},
    DictEntry{tags::kPixelRepresentation, "US", "PixelRepresentation"},
    DictEntry{Tag{0x0040, 0x0275}, "SQ", "RequestAttributesSequence"},
    DictEntry{tags::kPixelData, "OW", "PixelData"},
};

constexpr std::array<std::string_view, 15> kSupportedVrs = {
    "PN", "LO", "SH", "DA", "TM", "UI", "US", "UL", "CS", "DS", "IS", "OB", "OW", "SQ", "UN"};

bool long_form_vr(std::string_view vr) {
  return vr == "OB" || vr == "OW" || vr == "SQ" || vr == "UN";
}

bool is_text_vr(std::string_view vr) {
  return vr == "PN" || vr == "LO" || vr == "SH" || vr == "DA" || vr == "TM" || vr == "CS" ||
         vr == "DS" || vr == "IS";
}

std::string effective_vr(const Element& e) {
  if (!e.vr.empty()) return e.vr;
  auto vr = dictionary_vr(e.tag);
  return vr ? std::string(*vr) : std::string();
}

std::optional<std::uint8_t> pad_byte(std::string_view vr) {
  if (is_text_vr(vr)) return static_cast<std::uint8_t>(' ');
  if (vr == "UI" || vr == "OB" || vr == "UN") return static_cast<std::uint8_t>(0);
  return std::nullopt;
}

class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool at_end() const { return pos_ >= data_.size(); }

  [[noreturn]] void error(const std::string& what, std::size_t at) const {
    fail(Errc::kParseError, what + " at byte offset " + std::to_string(at));
  }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) error(std::string("truncated ") + what, pos_);
  }

  std::uint16_t u16() {
    need(2, "element");
    std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4, "element");
    std::uint32_t v = static_cast<std::uint32_t>(data_[pos_]) |
                      (static_cast<std::uint32_t>(data_[pos_ + 1]) << 8) |
                      (static_cast<std::uint32_t>(data_[pos_ + 2]) << 16) |
                      (static_cast<std::uint32_t>(data_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }
  Tag peek_tag() const {
    if (remaining() < 4) error("truncated tag", pos_);
    return Tag{static_cast<std::uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8)),
               static_cast<std::uint16_t>(data_[pos_ + 2] | (data_[pos_ + 3] << 8))};
  }
  Tag tag() {
    Tag t = peek_tag();
    pos_ += 4;
    return t;
  }
  Bytes take(std::size_t n, const char* what) {
    need(n, what);
    Bytes out(data_.begin() + static_cast<std::ptrdiff_t>(pos_),
              data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return out;
  }
  std::string vr() {
    need(2, "VR");
    std::string v{static_cast<char>(data_[pos_]), static_cast<char>(data_[pos_ + 1])};
    pos_ += 2;
    return v;
  }
  Reader sub(std::size_t n) {
    need(n, "value");
    Reader r(data_.subspan(0, pos_ + n));
    r.pos_ = pos_;
    pos_ += n;
    return r;
  }

 private:
  ByteView data_;
  std::size_t pos_ = 0;
};

std::vector<Element> parse_elements(Reader& in, bool explicit_vr, int depth,
                                    bool stop_at_item_delim, bool meta_only);

std::vector<Item> parse_items(Reader& in, bool explicit_vr, int depth, bool undefined) {
  std::vector<Item> items;
  while (!in.at_end()) {
    const std::size_t at = in.pos();
    const Tag t = in.tag();
    const std::uint32_t len = in.u32();
    if (t == tags::kSequenceDelimitation) {
      if (!undefined) in.error("sequence delimiter inside defined-length sequence", at);
      return items;
    }
    if (t != tags::kItem) in.error("expected item tag, found " + t.str(), at);
    Item item;
    if (len == kUndefinedLength) {
      item.undefined_length = true;
      item.elements = parse_elements(in, explicit_vr, depth + 1, true, false);
    } else {
      Reader body = in.sub(len);
      item.elements = parse_elements(body, explicit_vr, depth + 1, false, false);
    }
    items.push_back(std::move(item));
  }
  if (undefined) in.error("unterminated sequence", in.pos());
  return items;
}

std::vector<Element> parse_elements(Reader& in, bool explicit_vr, int depth,
                                    bool stop_at_item_delim, bool meta_only) {
  if (depth > kMaxNesting) in.error("sequence nesting too deep", in.pos());
  std::vector<Element> out;
  while (!in.at_end()) {
    const std::size_t at = in.pos();
    if (meta_only && in.peek_tag().group != 0x0002) break;
    Element e;
    e.tag = in.tag();
    if (e.tag == tags::kItemDelimitation) {
      if (!stop_at_item_delim) in.error("unexpected item delimiter", at);
      in.u32();
      return out;
    }
    if (e.tag.group == 0xFFFE) in.error("unexpected delimiter " + e.tag.str(), at);
    if (!out.empty() && !(out.back().tag < e.tag)) {
      in.error("tags out of order: " + e.tag.str() + " after " + out.back().tag.str(), at);
    }
    std::uint32_t len = 0;
    if (explicit_vr) {
      e.vr = in.vr();
      if (!is_supported_vr(e.vr)) in.error("unknown explicit VR '" + e.vr + "'", at + 4);
      if (long_form_vr(e.vr)) {
        in.u16();  // reserved
        len = in.u32();
      } else {
        len = in.u16();
      }
    } else {
      len = in.u32();
    }
    const std::string vr = effective_vr(e);
    const bool is_sequence = vr == "SQ" || (!explicit_vr && len == kUndefinedLength);
    if (is_sequence) {
      e.sequence = true;
      e.undefined_length = len == kUndefinedLength;
      if (e.undefined_length) {
        e.items = parse_items(in, explicit_vr, depth + 1, true);
      } else {
        Reader body = in.sub(len);
        e.items = parse_items(body, explicit_vr, depth + 1, false);
      }
    } else {
      if (len == kUndefinedLength) {
        in.error("undefined length on non-sequence element " + e.tag.str(), at);
      }
      e.value = in.take(len, "element value");
    }
    out.push_back(std::move(e));
  }
  if (stop_at_item_delim) in.error("unterminated item", in.pos());
  return out;
}

void put_u16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}
void put_tag(Bytes& out, Tag t) {
  put_u16(out, t.group);
  put_u16(out, t.element);
}
void patch_u32(Bytes& out, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[at + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF);
}

void write_elements(Bytes& out, const std::vector<Element>& elements, bool explicit_vr, int depth);

void write_element(Bytes& out, const Element& e, bool explicit_vr, int depth) {
  if (depth > kMaxNesting) fail(Errc::kSerializeError, "sequence nesting too deep");
  const std::string vr = effective_vr(e);
  put_tag(out, e.tag);
  std::size_t len_at = 0;
  if (explicit_vr) {
    const std::string write_vr = e.sequence ? "SQ" : vr;
    if (!is_supported_vr(write_vr)) {
      fail(Errc::kSerializeError, e.tag.str() + " has no explicit VR to write");
    }
    out.push_back(static_cast<std::uint8_t>(write_vr[0]));
    out.push_back(static_cast<std::uint8_t>(write_vr[1]));
    if (long_form_vr(write_vr)) {
      put_u16(out, 0);
      len_at = out.size();
      put_u32(out, 0);
    } else {
      len_at = out.size();
      put_u16(out, 0);
    }
  } else {
    len_at = out.size();
    put_u32(out, 0);
  }

  if (e.sequence) {
    const std::size_t body_start = out.size();
    for (const Item& item : e.items) {
      put_tag(out, tags::kItem);
      const std::size_t item_len_at = out.size();
      put_u32(out, 0);
      const std::size_t item_start = out.size();
      write_elements(out, item.elements, explicit_vr, depth + 1);
      if (item.undefined_length) {
        patch_u32(out, item_len_at, kUndefinedLength);
        put_tag(out, tags::kItemDelimitation);
        put_u32(out, 0);
      } else {
        patch_u32(out, item_len_at, static_cast<std::uint32_t>(out.size() - item_start));
      }
    }
    if (e.undefined_length) {
      put_tag(out, tags::kSequenceDelimitation);
      put_u32(out, 0);
      patch_u32(out, len_at, kUndefinedLength);
    } else {
      patch_u32(out, len_at, static_cast<std::uint32_t>(out.size() - body_start));
    }
    return;
  }

  Bytes value = e.value;
  if (value.size() % 2 == 1) {
    auto pad = pad_byte(vr);
    if (!pad) fail(Errc::kSerializeError, e.tag.str() + " has odd length and VR '" + vr + "' has no pad rule");
    value.push_back(*pad);
  }
  const bool short_len = explicit_vr && !long_form_vr(vr);
  if (short_len) {
    if (value.size() > 0xFFFF) fail(Errc::kSerializeError, e.tag.str() + " value too long for VR " + vr);
    out[len_at] = static_cast<std::uint8_t>(value.size() & 0xFF);
    out[len_at + 1] = static_cast<std::uint8_t>(value.size() >> 8);
  } else {
    patch_u32(out, len_at, static_cast<std::uint32_t>(value.size()));
  }
  out.insert(out.end(), value.begin(), value.end());
}

void write_elements(Bytes& out, const std::vector<Element>& elements, bool explicit_vr, int depth) {
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (i > 0 && !(elements[i - 1].tag < elements[i].tag)) {
      fail(Errc::kSerializeError, "tags not strictly ascending: " + elements[i].tag.str() +
                                      " after " + elements[i - 1].tag.str());
    }
    write_element(out, elements[i], explicit_vr, depth);
  }
}

std::string trim_padding(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) s.pop_back();
  return s;
}

std::vector<Element>& container_for(DicomObject& obj, Tag tag) {
  return tag.group == 0x0002 ? obj.meta : obj.dataset;
}

void upsert(std::vector<Element>& elements, Element e) {
  auto it = std::lower_bound(elements.begin(), elements.end(), e.tag,
                             [](const Element& x, Tag t) { return x.tag < t; });
  if (it != elements.end() && it->tag == e.tag) {
    *it = std::move(e);
  } else {
    elements.insert(it, std::move(e));
  }
}

void dump_elements(std::ostringstream& os, const std::vector<Element>& elements, int indent) {
  for (const auto& e : elements) {
    os << std::string(static_cast<std::size_t>(indent) * 2, ' ') << e.tag.str() << ' '
       << (e.vr.empty() ? effective_vr(e).empty() ? "--" : effective_vr(e) : e.vr) << ' ';
    auto kw = dictionary_keyword(e.tag);
    os << (kw ? *kw : std::string_view("?")) << ' ';
    if (e.sequence) {
      os << e.items.size() << " item(s)\n";
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        os << std::string(static_cast<std::size_t>(indent + 1) * 2, ' ') << "item " << i << '\n';
        dump_elements(os, e.items[i].elements, indent + 2);
      }
      continue;
    }
    const std::string vr = effective_vr(e);
    if (is_text_vr(vr) || vr == "UI") {
      os << '"' << e.string_value() << "\"\n";
    } else if (vr == "US" && e.value.size() >= 2) {
      os << (e.value[0] | (e.value[1] << 8)) << '\n';
    } else {
      os << e.value.size() << " bytes\n";
    }
  }
}

}  // namespace

std::string Tag::str() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "(%04X,%04X)", group, element);
  return buf;
}

std::optional<Tag> Tag::parse(std::string_view text) {
  if (text.size() == 11 && text.front() == '(' && text.back() == ')') {
    text = text.substr(1, 9);
  }
  if (text.size() != 9 || text[4] != ',') return std::nullopt;
  auto hex4 = [](std::string_view s) -> std::optional<std::uint16_t> {
    std::uint16_t v = 0;
    for (char c : s) {
      int d = 0;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
      else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else return std::nullopt;
      v = static_cast<std::uint16_t>((v << 4) | d);
    }
    return v;
  };
  auto g = hex4(text.substr(0, 4));
  auto e = hex4(text.substr(5, 4));
  if (!g || !e) return std::nullopt;
  return Tag{*g, *e};
}

std::optional<std::string_view> dictionary_vr(Tag tag) {
  for (const auto& d : kDictionary) {
    if (d.tag == tag) return d.vr;
  }
  // Group lengths are UL by definition.
  if (tag.element == 0x0000) return "UL";
  return std::nullopt;
}

std::optional<std::string_view> dictionary_keyword(Tag tag) {
  for (const auto& d : kDictionary) {
    if (d.tag == tag) return d.keyword;
  }
  return std::nullopt;
}

bool is_supported_vr(std::string_view vr) {
  return std::find(kSupportedVrs.begin(), kSupportedVrs.end(), vr) != kSupportedVrs.end();
}

bool Item::operator==(const Item&) const = default;

std::string Element::string_value() const {
  return trim_padding(std::string(value.begin(), value.end()));
}

const Element* DicomObject::find(Tag tag) const {
  const auto& v = tag.group == 0x0002 ? meta : dataset;
  for (const auto& e : v) {
    if (e.tag == tag) return &e;
  }
  return nullptr;
}

Element* DicomObject::find(Tag tag) {
  return const_cast<Element*>(static_cast<const DicomObject*>(this)->find(tag));
}

std::optional<std::string> DicomObject::get_string(Tag tag) const {
  const Element* e = find(tag);
  if (e == nullptr || e->sequence) return std::nullopt;
  return e->string_value();
}

std::optional<std::uint16_t> DicomObject::get_u16(Tag tag) const {
  const Element* e = find(tag);
  if (e == nullptr || e->value.size() < 2) return std::nullopt;
  return static_cast<std::uint16_t>(e->value[0] | (e->value[1] << 8));
}

Bytes padded_text(std::string_view vr, std::string_view text) {
  Bytes v = to_bytes(text);
  if (v.size() % 2 == 1) v.push_back(vr == "UI" ? 0 : ' ');
  return v;
}

void DicomObject::set_string(Tag tag, std::string_view vr, std::string_view text) {
  set_bytes(tag, vr, padded_text(vr, text));
}

void DicomObject::set_u16(Tag tag, std::uint16_t value) {
  set_bytes(tag, "US", Bytes{static_cast<std::uint8_t>(value & 0xFF), static_cast<std::uint8_t>(value >> 8)});
}

void DicomObject::set_bytes(Tag tag, std::string_view vr, Bytes value) {
  Element e;
  e.tag = tag;
  // Elements of an implicit-VR dataset carry no VR; the meta group is always explicit.
  e.vr = (tag.group == 0x0002 || explicit_vr()) ? std::string(vr) : std::string();
  e.value = std::move(value);
  upsert(container_for(*this, tag), std::move(e));
}

bool DicomObject::erase(Tag tag) {
  auto& v = container_for(*this, tag);
  auto it = std::find_if(v.begin(), v.end(), [&](const Element& e) { return e.tag == tag; });
  if (it == v.end()) return false;
  v.erase(it);
  return true;
}

void DicomObject::update_meta_group_length() {
  Element* length = find(tags::kFileMetaGroupLength);
  if (length == nullptr) return;
  std::vector<Element> rest;
  for (const auto& e : meta) {
    if (e.tag != tags::kFileMetaGroupLength) rest.push_back(e);
  }
  Bytes encoded;
  write_elements(encoded, rest, true, 0);
  const auto n = static_cast<std::uint32_t>(encoded.size());
  length->vr = "UL";
  length->value = Bytes{static_cast<std::uint8_t>(n & 0xFF), static_cast<std::uint8_t>((n >> 8) & 0xFF),
                        static_cast<std::uint8_t>((n >> 16) & 0xFF), static_cast<std::uint8_t>(n >> 24)};
}

DicomObject parse_dicom(ByteView bytes) {
  if (bytes.size() < 132) fail(Errc::kParseError, "file shorter than preamble and magic at byte offset 0");
  if (!(bytes[128] == 'D' && bytes[129] == 'I' && bytes[130] == 'C' && bytes[131] == 'M')) {
    fail(Errc::kParseError, "missing DICM magic at byte offset 128");
  }
  DicomObject obj;
  obj.preamble.assign(bytes.begin(), bytes.begin() + 128);
  Reader in(bytes.subspan(0));
  in.take(132, "preamble");
  obj.meta = parse_elements(in, true, 0, false, true);

  const Element* ts = obj.find(tags::kTransferSyntaxUid);
  if (ts == nullptr) {
    // A bare header with nothing after it is the empty object.
    if (in.at_end()) return obj;
    fail(Errc::kUnsupportedFormat, "meta group lacks a transfer syntax UID");
  }
  obj.transfer_syntax = ts->string_value();
  if (obj.transfer_syntax != kImplicitVrLittleEndian &&
      obj.transfer_syntax != kExplicitVrLittleEndian) {
    fail(Errc::kUnsupportedFormat, "unsupported transfer syntax " + obj.transfer_syntax);
  }
  obj.dataset = parse_elements(in, obj.explicit_vr(), 0, false, false);
  return obj;
}

Bytes serialize_dicom(const DicomObject& obj) {
  if (obj.preamble.size() != 128) fail(Errc::kSerializeError, "preamble must be 128 bytes");
  for (const auto& e : obj.meta) {
    if (e.tag.group != 0x0002) fail(Errc::kSerializeError, "meta group holds " + e.tag.str());
  }
  for (const auto& e : obj.dataset) {
    if (e.tag.group == 0x0002) fail(Errc::kSerializeError, "dataset holds meta element " + e.tag.str());
  }
  if (obj.transfer_syntax != kImplicitVrLittleEndian &&
      obj.transfer_syntax != kExplicitVrLittleEndian) {
    fail(Errc::kSerializeError, "unsupported transfer syntax " + obj.transfer_syntax);
  }
  Bytes out = obj.preamble;
  out.insert(out.end(), {'D', 'I', 'C', 'M'});
  write_elements(out, obj.meta, true, 0);
  write_elements(out, obj.dataset, obj.explicit_vr(), 0);
  return out;
}

std::string dump(const DicomObject& obj) {
  std::ostringstream os;
  os << "# transfer syntax " << obj.transfer_syntax << '\n';
  dump_elements(os, obj.meta, 0);
  dump_elements(os, obj.dataset, 0);
  return os.str();
}

}  // namespace mlpod::dicom
