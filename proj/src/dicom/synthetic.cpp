/*
 * synthetic.cpp
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

#include "mlpod/dicom/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <random>

#include "mlpod/common/util.hpp"

namespace mlpod::dicom {
namespace {

std::string uid_from(std::uint64_t seed, std::uint64_t salt, std::size_t index) {
  return "1.2.826.0.1.3680043.10.543." + std::to_string(seed % 1000000007ULL) + "." +
         std::to_string(salt) + "." + std::to_string(index);
}

Item make_item(std::vector<Element> elements) {
  Item item;
  item.elements = std::move(elements);
  return item;
}

Element text_element(Tag tag, std::string_view vr, std::string_view text, bool explicit_vr) {
  Element e;
  e.tag = tag;
  e.vr = explicit_vr ? std::string(vr) : std::string();
  e.value = padded_text(vr, text);
  return e;
}

}  // namespace

std::vector<DicomObject> synthetic_series(const SyntheticSeriesOptions& o) {
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> noise(0.0, 12.0);
  const std::string study_uid = uid_from(o.seed, 1, 0);
  const std::string series_uid = uid_from(o.seed, 2, 0);
  const std::string ts(o.explicit_vr ? kExplicitVrLittleEndian : kImplicitVrLittleEndian);

  // Opacity blobs shared by every slice so the pattern is volumetric.
  struct Blob {
    double x, y, z, r;
  };
  std::vector<Blob> blobs;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int blob_count = static_cast<int>(std::round(o.opacity * 6.0));
  for (int b = 0; b < blob_count; ++b) {
    const double side = b % 2 == 0 ? 0.3 : 0.7;
    blobs.push_back({side + (u(rng) - 0.5) * 0.15, 0.35 + u(rng) * 0.3, u(rng), 0.06 + 0.08 * u(rng)});
  }

  std::vector<DicomObject> series;
  for (std::size_t s = 0; s < o.slices; ++s) {
    DicomObject obj;
    obj.transfer_syntax = ts;
    const std::string sop_uid = uid_from(o.seed, 3, s + 1);
    obj.set_bytes(tags::kFileMetaGroupLength, "UL", Bytes(4, 0));
    obj.set_bytes(tags::kFileMetaVersion, "OB", Bytes{0x00, 0x01});
    obj.set_string(tags::kMediaStorageSopClassUid, "UI", "1.2.840.10008.5.1.4.1.1.2");
    obj.set_string(tags::kMediaStorageSopInstanceUid, "UI", sop_uid);
    obj.set_string(tags::kTransferSyntaxUid, "UI", ts);
    obj.set_string(tags::kImplementationClassUid, "UI", "1.2.826.0.1.3680043.10.543.1");
    obj.update_meta_group_length();

    obj.set_string(tags::kSopClassUid, "UI", "1.2.840.10008.5.1.4.1.1.2");
    obj.set_string(tags::kSopInstanceUid, "UI", sop_uid);
    obj.set_string(tags::kStudyDate, "DA", "20240115");
    obj.set_string(tags::kAccessionNumber, "SH", o.accession_number);
    obj.set_string(tags::kModality, "CS", "CT");
    obj.set_string(tags::kInstitutionName, "LO", o.institution);
    obj.set_string(tags::kReferringPhysicianName, "PN", o.referring_physician);
    obj.set_string(tags::kPatientName, "PN", o.patient_name);
    obj.set_string(tags::kPatientId, "LO", o.patient_id);
    obj.set_string(tags::kPatientBirthDate, "DA", o.birth_date);
    obj.set_string(tags::kOtherPatientIds, "LO", o.other_patient_ids);
    obj.set_string(tags::kPatientAddress, "LO", o.address);
    obj.set_string(tags::kStudyInstanceUid, "UI", study_uid);
    obj.set_string(tags::kSeriesInstanceUid, "UI", series_uid);
    obj.set_string(tags::kInstanceNumber, "IS", std::to_string(s + 1));
    obj.set_u16(tags::kSamplesPerPixel, 1);
    obj.set_string(tags::kPhotometricInterpretation, "CS", "MONOCHROME2");
    obj.set_u16(tags::kRows, o.rows);
    obj.set_u16(tags::kColumns, o.columns);
    obj.set_u16(tags::kBitsAllocated, 16);
    obj.set_u16(tags::kBitsStored, 12);
    obj.set_u16(tags::kHighBit, 11);
    obj.set_u16(tags::kPixelRepresentation, 0);

    if (o.nested_phi) {
      Element ref_series;
      ref_series.tag = tags::kReferencedSeriesSequence;
      ref_series.vr = o.explicit_vr ? "SQ" : "";
      ref_series.sequence = true;
      ref_series.undefined_length = s % 2 == 0;
      ref_series.items.push_back(make_item({text_element(tags::kSeriesInstanceUid, "UI", series_uid, o.explicit_vr)}));
      obj.dataset.push_back(ref_series);

      Element request;
      request.tag = Tag{0x0040, 0x0275};
      request.vr = o.explicit_vr ? "SQ" : "";
      request.sequence = true;
      request.undefined_length = true;
      Item item = make_item({text_element(tags::kAccessionNumber, "SH", o.accession_number, o.explicit_vr),
                             text_element(tags::kPatientName, "PN", o.patient_name, o.explicit_vr),
                             text_element(tags::kPatientId, "LO", o.patient_id, o.explicit_vr)});
      item.undefined_length = s % 3 == 0;
      request.items.push_back(std::move(item));
      obj.dataset.push_back(request);
      std::sort(obj.dataset.begin(), obj.dataset.end(),
                [](const Element& a, const Element& b) { return a.tag < b.tag; });
    }

    Bytes pixels;
    pixels.reserve(static_cast<std::size_t>(o.rows) * o.columns * 2);
    const double z = o.slices > 1 ? static_cast<double>(s) / static_cast<double>(o.slices - 1) : 0.5;
    const double lung_scale = 0.6 + 0.4 * std::sin(3.14159265358979 * z);
    for (std::uint16_t r = 0; r < o.rows; ++r) {
      for (std::uint16_t c = 0; c < o.columns; ++c) {
        const double x = (c + 0.5) / o.columns;
        const double y = (r + 0.5) / o.rows;
        double v = 40.0;  // air outside the body
        const double body = std::pow((x - 0.5) / 0.45, 2) + std::pow((y - 0.5) / 0.38, 2);
        if (body <= 1.0) v = 1040.0;
        for (double lx : {0.3, 0.7}) {
          const double lung = std::pow((x - lx) / (0.14 * lung_scale), 2) +
                              std::pow((y - 0.5) / (0.26 * lung_scale), 2);
          if (lung <= 1.0) v = 180.0;
        }
        for (const auto& b : blobs) {
          const double d2 = (x - b.x) * (x - b.x) + (y - b.y) * (y - b.y) + 0.2 * (z - b.z) * (z - b.z);
          if (d2 < b.r * b.r && v < 600.0) v += 420.0 * o.opacity;
        }
        v += noise(rng);
        const auto px = static_cast<std::uint16_t>(std::clamp(v, 0.0, 4095.0));
        pixels.push_back(static_cast<std::uint8_t>(px & 0xFF));
        pixels.push_back(static_cast<std::uint8_t>(px >> 8));
      }
    }
    obj.set_bytes(tags::kPixelData, "OW", std::move(pixels));
    series.push_back(std::move(obj));
  }
  return series;
}

std::vector<std::filesystem::path> write_series(const std::filesystem::path& dir,
                                                const std::vector<DicomObject>& series) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (std::size_t i = 0; i < series.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "slice-%04zu.dcm", i + 1);
    const auto path = dir / name;
    write_file_atomic(path, serialize_dicom(series[i]));
    paths.push_back(path);
  }
  return paths;
}

}  // namespace mlpod::dicom
