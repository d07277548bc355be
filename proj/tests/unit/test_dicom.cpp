/*
 * test_dicom.cpp
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

#include <algorithm>
#include <random>
#include <regex>
#include <set>

#include "doctest.h"
#include "mlpod/common/error.hpp"
#include "mlpod/dicom/anonymize.hpp"
#include "mlpod/dicom/synthetic.hpp"
#include "mlpod/common/util.hpp"

using namespace mlpod;
using namespace mlpod::dicom;

namespace {

// Hand-assembled explicit VR little endian file:
//   preamble, "DICM",
//   (0002,0010) UI len 20 "1.2.840.10008.1.2.1\0",
//   (0010,0010) PN len 8  "DOE^JOHN"
Bytes hand_built_file(std::string_view name_value) {
  Bytes b(128, 0);
  for (char c : std::string_view("DICM")) b.push_back(static_cast<std::uint8_t>(c));
  const Bytes meta = {0x02, 0x00, 0x10, 0x00, 'U', 'I', 20, 0x00};
  b.insert(b.end(), meta.begin(), meta.end());
  for (char c : std::string_view("1.2.840.10008.1.2.1")) b.push_back(static_cast<std::uint8_t>(c));
  b.push_back(0x00);
  const Bytes pn = {0x10, 0x00, 0x10, 0x00, 'P', 'N', static_cast<std::uint8_t>(name_value.size()), 0x00};
  b.insert(b.end(), pn.begin(), pn.end());
  for (char c : name_value) b.push_back(static_cast<std::uint8_t>(c));
  return b;
}

Errc error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::kInternal;
}

bool contains_bytes(const Bytes& hay, std::string_view needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

const Bytes kSalt = to_bytes("test-salt");

std::size_t count_tag(const std::vector<Element>& elements, Tag tag) {
  std::size_t n = 0;
  for (const auto& e : elements) {
    if (e.tag == tag) ++n;
    for (const auto& item : e.items) n += count_tag(item.elements, tag);
  }
  return n;
}

}  // namespace

TEST_CASE("tag formatting and parsing") {
  CHECK(tags::kPatientName.str() == "(0010,0010)");
  CHECK(Tag{0x7FE0, 0x0010}.str() == "(7FE0,0010)");
  CHECK(Tag::parse("0020,000d") == tags::kStudyInstanceUid);
  CHECK(Tag::parse("(0008,0018)") == tags::kSopInstanceUid);
  CHECK_FALSE(Tag::parse("0010-0010").has_value());
  CHECK_FALSE(Tag::parse("00G0,0010").has_value());
}

TEST_CASE("parse a hand-built explicit VR file") {
  const Bytes file = hand_built_file("DOE^JOHN");
  DicomObject obj = parse_dicom(file);
  CHECK(obj.transfer_syntax == kExplicitVrLittleEndian);
  REQUIRE(obj.dataset.size() == 1);
  CHECK(obj.dataset[0].tag == tags::kPatientName);
  CHECK(obj.dataset[0].vr == "PN");
  CHECK(obj.get_string(tags::kPatientName) == "DOE^JOHN");
  CHECK(serialize_dicom(obj) == file);

  // Odd-length names carry a trailing space pad that string access strips.
  DicomObject padded = parse_dicom(hand_built_file("DOE^JAN "));
  CHECK(padded.get_string(tags::kPatientName) == "DOE^JAN");
}

TEST_CASE("parse errors") {
  Bytes file = hand_built_file("DOE^JOHN");
  SUBCASE("missing magic") {
    file[129] = 'X';
    CHECK(error_of([&] { parse_dicom(file); }) == Errc::kParseError);
  }
  SUBCASE("too short") {
    CHECK(error_of([&] { parse_dicom(Bytes(100, 0)); }) == Errc::kParseError);
  }
  SUBCASE("truncated element") {
    file.resize(file.size() - 3);
    try {
      parse_dicom(file);
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kParseError);
      CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
    }
  }
  SUBCASE("unknown explicit VR") {
    file[132 + 28 + 4] = 'Z';
    file[132 + 28 + 5] = 'Z';
    try {
      parse_dicom(file);
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kParseError);
      CHECK(std::string(e.what()).find("byte offset 164") != std::string::npos);
    }
  }
  SUBCASE("unsupported transfer syntax") {
    DicomObject obj = parse_dicom(file);
    obj.set_string(tags::kTransferSyntaxUid, "UI", "1.2.840.10008.1.2.4.50");
    obj.transfer_syntax = kExplicitVrLittleEndian;
    const Bytes jpeg = serialize_dicom(obj);
    CHECK(error_of([&] { parse_dicom(jpeg); }) == Errc::kUnsupportedFormat);
  }
}

TEST_CASE("empty objects") {
  Bytes bare(128, 0);
  for (char c : std::string_view("DICM")) bare.push_back(static_cast<std::uint8_t>(c));
  DicomObject obj = parse_dicom(bare);
  CHECK(obj.meta.empty());
  CHECK(obj.dataset.empty());
  CHECK(serialize_dicom(obj) == bare);

  DicomObject minimal;
  minimal.set_string(tags::kTransferSyntaxUid, "UI", kExplicitVrLittleEndian);
  const Bytes out = serialize_dicom(minimal);
  CHECK(out.size() == 132 + 8 + 20);
  CHECK(parse_dicom(out) == minimal);
}

TEST_CASE("serialize rejects descending tags and odd values without a pad rule") {
  DicomObject obj = parse_dicom(hand_built_file("DOE^JOHN"));
  Element earlier;
  earlier.tag = tags::kModality;
  earlier.vr = "CS";
  earlier.value = to_bytes("CT");
  obj.dataset.push_back(earlier);
  CHECK(error_of([&] { serialize_dicom(obj); }) == Errc::kSerializeError);

  DicomObject odd = parse_dicom(hand_built_file("DOE^JOHN"));
  odd.set_bytes(tags::kRows, "US", Bytes{1, 2, 3});
  CHECK(error_of([&] { serialize_dicom(odd); }) == Errc::kSerializeError);

  // Text VRs pad with a space instead of failing.
  DicomObject text = parse_dicom(hand_built_file("DOE^JOHN"));
  text.set_bytes(tags::kPatientId, "LO", to_bytes("ABC"));
  CHECK(parse_dicom(serialize_dicom(text)).get_string(tags::kPatientId) == "ABC");
}

TEST_CASE("synthetic series round trip in both transfer syntaxes") {
  for (bool explicit_vr : {true, false}) {
    SyntheticSeriesOptions o;
    o.slices = 4;
    o.explicit_vr = explicit_vr;
    o.opacity = 0.5;
    for (const auto& obj : synthetic_series(o)) {
      const Bytes bytes = serialize_dicom(obj);
      const DicomObject back = parse_dicom(bytes);
      CHECK(serialize_dicom(back) == bytes);
      CHECK(back.get_string(tags::kPatientName) == "DOE^JOHN");
      CHECK(back.get_u16(tags::kRows) == 32);
      const Element* seq = back.find(Tag{0x0040, 0x0275});
      REQUIRE(seq != nullptr);
      CHECK(seq->sequence);
      CHECK(seq->items.at(0).elements.size() == 3);
    }
  }
}

TEST_CASE("property: random valid objects round trip") {
  std::mt19937_64 rng(1234);
  const std::vector<Tag> pool = {tags::kSopInstanceUid, tags::kStudyDate, tags::kAccessionNumber,
                                 tags::kModality, tags::kPatientName, tags::kPatientId,
                                 tags::kInstanceNumber, tags::kRows, Tag{0x0009, 0x1001},
                                 Tag{0x0011, 0x0010}, tags::kPixelData};
  const std::vector<std::string> vrs = {"LO", "SH", "CS", "UN", "OB"};
  for (int trial = 0; trial < 300; ++trial) {
    DicomObject obj;
    obj.transfer_syntax = (rng() & 1) ? std::string(kExplicitVrLittleEndian) : std::string(kImplicitVrLittleEndian);
    obj.set_string(tags::kTransferSyntaxUid, "UI", obj.transfer_syntax);
    for (const Tag& t : pool) {
      if (rng() % 3 == 0) continue;
      const std::string vr = dictionary_vr(t) ? std::string(*dictionary_vr(t)) : vrs[rng() % vrs.size()];
      Bytes value(2 * (rng() % 20));
      for (auto& b : value) b = static_cast<std::uint8_t>('A' + rng() % 26);
      if (t == tags::kPixelData || vr == "US") {
        obj.set_bytes(t, vr, value);
      } else {
        obj.set_string(t, vr, std::string(value.begin(), value.end()));
      }
    }
    if (rng() & 1) {
      Element seq;
      seq.tag = tags::kReferencedStudySequence;
      seq.vr = obj.explicit_vr() ? "SQ" : "";
      seq.sequence = true;
      seq.undefined_length = true;  // implicit VR needs this to detect sequences
      Item item;
      item.undefined_length = (rng() & 1) != 0;
      Element inner;
      inner.tag = tags::kReferencedSopInstanceUid;
      inner.vr = obj.explicit_vr() ? "UI" : "";
      inner.value = padded_text("UI", "1.2.3.4");
      item.elements.push_back(inner);
      seq.items.push_back(item);
      obj.dataset.push_back(seq);
      std::sort(obj.dataset.begin(), obj.dataset.end(),
                [](const Element& a, const Element& b) { return a.tag < b.tag; });
    }
    const Bytes bytes = serialize_dicom(obj);
    const DicomObject back = parse_dicom(bytes);
    CHECK(back == obj);
    CHECK(serialize_dicom(back) == bytes);
  }
}

TEST_CASE("remap_uid") {
  // Independent evaluation: python3 hashlib.sha256(b"s" + b"1.2.3"), first 16 bytes big-endian.
  CHECK(remap_uid("1.2.3", as_bytes("s")) == "2.25.100562029321747609809105916685538934923");
  CHECK(remap_uid("1.2.3", as_bytes("s")) == remap_uid("1.2.3", as_bytes("s")));
  CHECK(remap_uid("1.2.3", as_bytes("s")) != remap_uid("1.2.4", as_bytes("s")));
  CHECK(remap_uid("1.2.3", as_bytes("s")) != remap_uid("1.2.3", as_bytes("t")));
  CHECK(remap_uid(std::string(64, '1'), as_bytes("s")).size() <= 64);
  CHECK(error_of([] { remap_uid("", as_bytes("s")); }) == Errc::kValidationError);
  CHECK(error_of([] { remap_uid("1..2", as_bytes("s")); }) == Errc::kValidationError);
  CHECK(error_of([] { remap_uid("1.2.a", as_bytes("s")); }) == Errc::kValidationError);
  CHECK(error_of([] { remap_uid(std::string(65, '1'), as_bytes("s")); }) == Errc::kValidationError);
}

TEST_CASE("anonymize with the default profile") {
  SyntheticSeriesOptions o;
  o.slices = 1;
  const DicomObject obj = synthetic_series(o)[0];
  const auto profile = AnonymizationProfile::defaults(kSalt);
  const auto result = anonymize(obj, profile);
  const DicomObject& anon = result.anon;

  CHECK(anon.find(tags::kPatientName) == nullptr);
  CHECK(count_tag(anon.dataset, tags::kPatientName) == 0);
  // Oracle: python3 hmac.new(b"test-salt", b"12345", sha256).hexdigest()[:12]
  CHECK(anon.get_string(tags::kPatientId) == "ANON-7e5dddd926b9");
  CHECK(anon.get_string(tags::kAccessionNumber) == "ANON-215453a5b02d");
  CHECK(anon.find(tags::kPixelData)->value == obj.find(tags::kPixelData)->value);
  CHECK(anon.get_string(tags::kModality) == "CT");
  CHECK(anon.get_string(tags::kStudyInstanceUid) ==
        remap_uid(*obj.get_string(tags::kStudyInstanceUid), kSalt));
  CHECK(anon.get_string(tags::kMediaStorageSopInstanceUid) == anon.get_string(tags::kSopInstanceUid));

  // Nested items are anonymized too.
  const Element* req = anon.find(Tag{0x0040, 0x0275});
  REQUIRE(req != nullptr);
  const auto& nested = req->items.at(0).elements;
  CHECK(std::none_of(nested.begin(), nested.end(), [](const Element& e) { return e.tag == tags::kPatientName; }));
  const Element* ref = anon.find(tags::kReferencedSeriesSequence);
  CHECK(ref->items.at(0).elements.at(0).string_value() == anon.get_string(tags::kSeriesInstanceUid));

  const Bytes raw = serialize_dicom(anon);
  CHECK_FALSE(contains_bytes(raw, "DOE^JOHN"));
  CHECK_FALSE(contains_bytes(raw, "12345"));
  CHECK(parse_dicom(raw) == parse_dicom(serialize_dicom(anon)));
  CHECK(result.map.entries.at(sha256_hex(as_bytes("12345"))) == "ANON-7e5dddd926b9");
}

TEST_CASE("anonymize identity, determinism, and blanking") {
  DicomObject plain = parse_dicom(hand_built_file("DOE^JOHN"));
  plain.erase(tags::kPatientName);
  plain.set_string(tags::kModality, "CS", "CT");
  CHECK(anonymize(plain, AnonymizationProfile::defaults(kSalt)).anon == plain);

  SyntheticSeriesOptions o;
  o.slices = 1;
  const DicomObject obj = synthetic_series(o)[0];
  auto profile = AnonymizationProfile::defaults(kSalt);
  CHECK(anonymize(obj, profile).anon == anonymize(obj, profile).anon);

  profile.actions[tags::kStudyDate] = Action::kBlank;
  const auto blanked = anonymize(obj, profile).anon;
  REQUIRE(blanked.find(tags::kStudyDate) != nullptr);
  CHECK(blanked.find(tags::kStudyDate)->value.empty());
}

TEST_CASE("UID remapping is consistent across a series") {
  SyntheticSeriesOptions o;
  o.slices = 5;
  const auto series = synthetic_series(o);
  const auto profile = AnonymizationProfile::defaults(kSalt);
  std::set<std::string> studies;
  std::set<std::string> sops;
  for (const auto& obj : series) {
    const auto anon = anonymize(obj, profile).anon;
    studies.insert(*anon.get_string(tags::kStudyInstanceUid));
    sops.insert(*anon.get_string(tags::kSopInstanceUid));
  }
  CHECK(studies.size() == 1);
  CHECK(sops.size() == 5);
}

TEST_CASE("profile file parsing") {
  auto p = AnonymizationProfile::from_json(
      R"({"salt_b64":"c2FsdA==","actions":[{"tag":"0010,0010","action":"REMOVE"},{"tag":"0010,0020","action":"PSEUDONYM"}]})");
  CHECK(p.salt == to_bytes("salt"));
  CHECK(p.actions.at(tags::kPatientName) == Action::kRemove);
  CHECK(AnonymizationProfile::from_json(p.to_json()).actions == p.actions);
  CHECK(error_of([] {
          AnonymizationProfile::from_json(R"({"salt_b64":"","actions":[{"tag":"7FE0,0010","action":"BLANK"}]})");
        }) == Errc::kValidationError);
  CHECK(error_of([] {
          AnonymizationProfile::from_json(R"({"salt_b64":"","actions":[{"tag":"0010,0010","action":"SHRED"}]})");
        }) == Errc::kValidationError);
}

TEST_CASE("shipped profile file equals the built-in defaults") {
  const auto shipped = AnonymizationProfile::from_json(read_text_file(MLPOD_SOURCE_DIR "/config/anonymization-profile.json"));
  CHECK(shipped.actions == AnonymizationProfile::defaults({}).actions);
}
