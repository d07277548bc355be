/*
 * synthetic.hpp
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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mlpod/dicom/dicom.hpp"

namespace mlpod::dicom {

// Parameters for a CT-like test series: an elliptical body with two darker
// lungs, optional bright opacities inside them, and seeded noise.
struct SyntheticSeriesOptions {
  std::size_t slices = 16;
  std::uint16_t rows = 32;
  std::uint16_t columns = 32;
  std::uint64_t seed = 1;
  double opacity = 0.0;  // 0 = clear lungs, 1 = heavy ground-glass pattern
  std::string patient_name = "DOE^JOHN";
  std::string patient_id = "12345";
  std::string birth_date = "19700101";
  std::string address = "1 MAIN ST^SPRINGFIELD";
  std::string institution = "GENERAL HOSPITAL";
  std::string referring_physician = "HOUSE^GREGORY";
  std::string accession_number = "ACC0001";
  std::string other_patient_ids = "MRN-998877";
  bool explicit_vr = true;
  // Copies PHI into nested sequence items as well.
  bool nested_phi = true;
};

std::vector<DicomObject> synthetic_series(const SyntheticSeriesOptions& options);

// Writes slice-0001.dcm, slice-0002.dcm, ... and returns the paths.
std::vector<std::filesystem::path> write_series(const std::filesystem::path& dir,
                                                const std::vector<DicomObject>& series);

}  // namespace mlpod::dicom
