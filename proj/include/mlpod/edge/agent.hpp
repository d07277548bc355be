/*
 * agent.hpp
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

#include "mlpod/common/crypto.hpp"
#include "mlpod/dicom/anonymize.hpp"
#include "mlpod/model/adapter.hpp"

namespace mlpod::edge {

struct FileFailure {
  std::string file;
  std::string message;
};

struct ExecutionSummary {
  std::string kind;
  std::size_t files_in = 0;
  std::size_t files_out = 0;
  std::vector<std::string> outputs;  // file names written to the output directory
  std::vector<FileFailure> failures;
  std::int64_t duration_ms = 0;

  bool ok() const { return failures.empty(); }
  std::string to_json() const;
};

// Verifies and decrypts a dispatched package; see model::open_package.
model::ModelManifest validate_package(ByteView package, ByteView edge_key);

// Anonymizes every *.dcm in `in` (lexical order) into `out` under the same
// file names. The merged pseudonym map goes to `map_path`, which must lie
// outside `out`. Unparseable files are recorded and skipped.
ExecutionSummary anonymize_directory(const dicom::AnonymizationProfile& profile,
                                     const std::filesystem::path& in,
                                     const std::filesystem::path& out,
                                     const std::filesystem::path& map_path);

// Runs a validated manifest locally. anonymizer: anonymize_directory with the
// embedded profile. stub: infers over the series in `in` and writes
// result.json. Errors: Errc::kUnknownKind, Errc::kIoError for an unreadable
// input directory, Errc::kInvalidArgument when map_path is inside `out`.
ExecutionSummary execute_package(const model::ModelManifest& manifest,
                                 const std::filesystem::path& in,
                                 const std::filesystem::path& out,
                                 const std::filesystem::path& map_path);

}  // namespace mlpod::edge
