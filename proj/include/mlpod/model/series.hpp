/*
 * series.hpp
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

#include <filesystem>
#include <string>
#include <vector>

#include "mlpod/common/crypto.hpp"
#include "mlpod/model/adapter.hpp"

namespace mlpod::model {

struct LoadedSeries {
  ScanInput scan;
  std::string patient_id;  // (0010,0020) of the first slice, empty if absent
  std::vector<std::string> sources;  // in slice order
};

// Builds a scan from DICOM files, ordering slices by InstanceNumber and
// falling back to source name when any slice lacks one. Requires 16-bit
// unsigned pixel data with Rows/Columns present.
LoadedSeries load_series(const std::vector<std::pair<std::string, Bytes>>& files);

// Every regular *.dcm file in the directory.
LoadedSeries load_series_dir(const std::filesystem::path& dir);

}  // namespace mlpod::model
