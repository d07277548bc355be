/*
 * agent.cpp
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

#include "mlpod/edge/agent.hpp"

#include <algorithm>
#include <chrono>

#include "json.hpp"
#include "mlpod/common/error.hpp"
#include "mlpod/common/util.hpp"
#include "mlpod/model/package.hpp"
#include "mlpod/model/series.hpp"

namespace mlpod::edge {
namespace fs = std::filesystem;
namespace {

using Json = nlohmann::json;

std::vector<fs::path> dicom_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(Errc::kIoError, "cannot read input directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".dcm") files.push_back(entry.path());
  }
  if (ec) fail(Errc::kIoError, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  return files;
}

bool is_within(const fs::path& candidate, const fs::path& dir) {
  const fs::path c = fs::weakly_canonical(fs::absolute(candidate));
  const fs::path d = fs::weakly_canonical(fs::absolute(dir));
  auto ci = c.begin();
  for (auto di = d.begin(); di != d.end(); ++di, ++ci) {
    if (di->empty()) continue;  // trailing separator
    if (ci == c.end() || *ci != *di) return false;
  }
  return true;
}

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - since)
      .count();
}

}  // namespace

std::string ExecutionSummary::to_json() const {
  Json failed = Json::array();
  for (const auto& f : failures) failed.push_back({{"file", f.file}, {"message", f.message}});
  return Json{{"kind", kind},         {"files_in", files_in}, {"files_out", files_out},
              {"outputs", outputs},   {"failures", failed},   {"duration_ms", duration_ms}}
      .dump();
}

model::ModelManifest validate_package(ByteView package, ByteView edge_key) {
  return model::open_package(package, edge_key).manifest;
}

ExecutionSummary anonymize_directory(const dicom::AnonymizationProfile& profile, const fs::path& in,
                                     const fs::path& out, const fs::path& map_path) {
  const auto start = std::chrono::steady_clock::now();
  if (is_within(map_path, out)) {
    fail(Errc::kInvalidArgument, "the pseudonym map must be written outside the output directory");
  }
  const auto files = dicom_files(in);
  ExecutionSummary summary;
  summary.kind = "anonymizer";
  summary.files_in = files.size();
  fs::create_directories(out);
  dicom::PseudonymMap merged;
  for (const auto& file : files) {
    const std::string name = file.filename().string();
    try {
      const auto result = dicom::anonymize(dicom::parse_dicom(read_file(file)), profile);
      write_file_atomic(out / name, dicom::serialize_dicom(result.anon));
      merged.merge(result.map);
      summary.outputs.push_back(name);
    } catch (const Error& e) {
      summary.failures.push_back({name, e.what()});
    }
  }
  summary.files_out = summary.outputs.size();
  write_file_atomic(map_path, as_bytes(merged.to_json()));
  summary.duration_ms = elapsed_ms(start);
  return summary;
}

ExecutionSummary execute_package(const model::ModelManifest& manifest, const fs::path& in,
                                 const fs::path& out, const fs::path& map_path) {
  if (manifest.kind == "anonymizer") {
    if (!manifest.profile) fail(Errc::kValidationError, "anonymizer manifest carries no profile");
    return anonymize_directory(dicom::AnonymizationProfile::from_json(*manifest.profile), in, out,
                               map_path);
  }
  if (manifest.kind != "stub") {
    fail(Errc::kUnknownKind, "edge agent cannot execute model kind " + manifest.kind);
  }
  const auto start = std::chrono::steady_clock::now();
  const auto files = dicom_files(in);
  ExecutionSummary summary;
  summary.kind = "stub";
  summary.files_in = files.size();
  std::vector<std::pair<std::string, Bytes>> loaded;
  for (const auto& f : files) loaded.emplace_back(f.filename().string(), read_file(f));
  try {
    const auto series = model::load_series(loaded);
    auto result = model::StubModel(manifest.params()).infer(series.scan);
    result.model_name = manifest.name;
    result.model_version = manifest.version;
    fs::create_directories(out);
    write_file_atomic(out / "result.json", as_bytes(result.to_json()));
    summary.outputs.push_back("result.json");
  } catch (const Error& e) {
    summary.failures.push_back({in.filename().string(), e.what()});
  }
  summary.files_out = summary.outputs.size();
  summary.duration_ms = elapsed_ms(start);
  return summary;
}

}  // namespace mlpod::edge
