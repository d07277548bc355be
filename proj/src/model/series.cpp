/*
 * series.cpp
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

#include "mlpod/model/series.hpp"

#include <algorithm>

#include "mlpod/common/error.hpp"
#include "mlpod/common/util.hpp"
#include "mlpod/dicom/dicom.hpp"

namespace mlpod::model {
namespace fs = std::filesystem;

namespace {

struct Decoded {
  std::string source;
  std::optional<long> instance;
  std::string patient_id;
  Slice slice;
};

Decoded decode(const std::string& source, const Bytes& bytes) {
  const dicom::DicomObject obj = dicom::parse_dicom(bytes);
  Decoded d;
  d.source = source;
  const auto rows = obj.get_u16(dicom::tags::kRows);
  const auto cols = obj.get_u16(dicom::tags::kColumns);
  const dicom::Element* pixels = obj.find(dicom::tags::kPixelData);
  if (!rows || !cols || !pixels) {
    fail(Errc::kUnsupportedFormat, source + ": missing Rows, Columns or PixelData");
  }
  if (auto bits = obj.get_u16(dicom::tags::kBitsAllocated); bits && *bits != 16) {
    fail(Errc::kUnsupportedFormat, source + ": only 16-bit pixel data is supported");
  }
  const std::size_t n = static_cast<std::size_t>(*rows) * *cols;
  if (pixels->value.size() < 2 * n) {
    fail(Errc::kUnsupportedFormat, source + ": pixel data shorter than Rows x Columns");
  }
  d.slice.width = *cols;
  d.slice.height = *rows;
  d.slice.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.slice.pixels[i] = static_cast<std::uint16_t>(pixels->value[2 * i] |
                                                   (pixels->value[2 * i + 1] << 8));
  }
  if (auto text = obj.get_string(dicom::tags::kInstanceNumber)) {
    try {
      std::size_t used = 0;
      long v = std::stol(*text, &used);
      if (used == text->size()) d.instance = v;
    } catch (const std::exception&) {
    }
  }
  d.patient_id = obj.get_string(dicom::tags::kPatientId).value_or("");
  return d;
}

}  // namespace

LoadedSeries load_series(const std::vector<std::pair<std::string, Bytes>>& files) {
  std::vector<Decoded> decoded;
  decoded.reserve(files.size());
  for (const auto& [source, bytes] : files) decoded.push_back(decode(source, bytes));
  const bool numbered = std::all_of(decoded.begin(), decoded.end(),
                                    [](const Decoded& d) { return d.instance.has_value(); });
  std::stable_sort(decoded.begin(), decoded.end(), [numbered](const Decoded& a, const Decoded& b) {
    if (numbered && *a.instance != *b.instance) return *a.instance < *b.instance;
    return a.source < b.source;
  });
  LoadedSeries out;
  for (auto& d : decoded) {
    if (out.patient_id.empty()) out.patient_id = d.patient_id;
    out.sources.push_back(d.source);
    out.scan.slices.push_back(std::move(d.slice));
  }
  out.scan.validate();
  return out;
}

LoadedSeries load_series_dir(const fs::path& dir) {
  std::vector<std::pair<std::string, Bytes>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".dcm") continue;
    files.emplace_back(entry.path().filename().string(), read_file(entry.path()));
  }
  return load_series(files);
}

}  // namespace mlpod::model
