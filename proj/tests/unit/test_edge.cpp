/*
 * test_edge.cpp
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
#include <filesystem>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "mlpod/common/error.hpp"
#include "mlpod/dicom/anonymize.hpp"
#include "mlpod/dicom/synthetic.hpp"
#include "mlpod/edge/agent.hpp"
#include "mlpod/model/package.hpp"
#include "mlpod/model/series.hpp"

using namespace mlpod;
using mlpod::testing::TempDir;
namespace fs = std::filesystem;

namespace {

const Bytes kEdgeKey = to_bytes("edge-key-for-tests-0123456789abcdef");

model::ModelManifest anonymizer_manifest() {
  model::ModelManifest m;
  m.name = "anonymizer";
  m.version = 1;
  m.kind = "anonymizer";
  m.profile = dicom::AnonymizationProfile::defaults(to_bytes("edge-test-salt")).to_json();
  // Canonical form, as modelpod stores it.
  return model::ModelManifest::from_json(m.to_json());
}

model::ModelManifest stub_manifest() {
  model::ModelManifest m;
  m.name = "stub-racnet";
  m.version = 3;
  m.kind = "stub";
  m.seed = 7;
  return m;
}

void write_fixture_series(const fs::path& dir, std::size_t n) {
  dicom::SyntheticSeriesOptions o;
  o.slices = n;
  o.rows = 16;
  o.columns = 16;
  dicom::write_series(dir, dicom::synthetic_series(o));
}

bool contains_bytes(const Bytes& hay, std::string_view needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

std::size_t count_entries(const fs::path& dir) {
  if (!fs::exists(dir)) return 0;
  return static_cast<std::size_t>(std::distance(fs::recursive_directory_iterator(dir), {}));
}

}  // namespace

TEST_CASE("validate_package returns the sealed manifest") {
  const auto m = anonymizer_manifest();
  const Bytes pkg = model::seal_package(m, kEdgeKey, 1700000000);
  CHECK(edge::validate_package(pkg, kEdgeKey) == m);

  Bytes truncated(pkg.begin(), pkg.end() - 5);
  try {
    edge::validate_package(truncated, kEdgeKey);
    FAIL("truncated package accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kBadSignature);
  }

  model::PackageHeader h;
  h.format_version = 2;
  h.model_name = m.name;
  h.model_version = m.version;
  try {
    edge::validate_package(model::seal_package(h, m, kEdgeKey), kEdgeKey);
    FAIL("format 2 accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kUnsupportedFormat);
  }
}

TEST_CASE("anonymizer over three fixture files") {
  TempDir tmp;
  write_fixture_series(tmp / "in", 3);
  const auto summary = edge::execute_package(anonymizer_manifest(), tmp / "in", tmp / "out",
                                             tmp / "local" / "map.json");
  CHECK(summary.ok());
  CHECK(summary.kind == "anonymizer");
  CHECK(summary.files_in == 3);
  CHECK(summary.files_out == 3);
  CHECK(count_entries(tmp / "out") == 3);
  REQUIRE(fs::exists(tmp / "local" / "map.json"));

  const auto profile = dicom::AnonymizationProfile::from_json(*anonymizer_manifest().profile);
  const auto map = nlohmann::json::parse(read_text_file(tmp / "local" / "map.json"));
  for (const auto& name : summary.outputs) {
    const Bytes raw = read_file(tmp / "out" / name);
    const auto obj = dicom::parse_dicom(raw);
    for (const auto& [tag, action] : profile.actions) {
      if (action == dicom::Action::kRemove) CHECK(obj.find(tag) == nullptr);
    }
    CHECK_FALSE(contains_bytes(raw, "DOE^JOHN"));
    CHECK_FALSE(contains_bytes(raw, "MRN-998877"));
    // The map's keys are digests of original values; none may leak.
    for (const auto& [digest, replacement] : map.items()) CHECK_FALSE(contains_bytes(raw, digest));
  }
}

TEST_CASE("empty input directory succeeds with nothing to do") {
  TempDir tmp;
  fs::create_directories(tmp / "in");
  const auto summary =
      edge::execute_package(anonymizer_manifest(), tmp / "in", tmp / "out", tmp / "map.json");
  CHECK(summary.ok());
  CHECK(summary.files_in == 0);
  CHECK(summary.files_out == 0);
}

TEST_CASE("one corrupt file among three is recorded and skipped") {
  TempDir tmp;
  write_fixture_series(tmp / "in", 2);
  write_file_atomic(tmp / "in" / "broken.dcm", to_bytes("definitely not DICOM"));
  const auto summary =
      edge::execute_package(anonymizer_manifest(), tmp / "in", tmp / "out", tmp / "map.json");
  CHECK_FALSE(summary.ok());
  CHECK(summary.files_in == 3);
  CHECK(summary.files_out == 2);
  REQUIRE(summary.failures.size() == 1);
  CHECK(summary.failures[0].file == "broken.dcm");
  CHECK_FALSE(fs::exists(tmp / "out" / "broken.dcm"));
  const auto j = nlohmann::json::parse(summary.to_json());
  CHECK(j["failures"][0]["file"] == "broken.dcm");
}

TEST_CASE("pseudonym map inside the output directory is refused before any write") {
  TempDir tmp;
  write_fixture_series(tmp / "in", 2);
  try {
    edge::execute_package(anonymizer_manifest(), tmp / "in", tmp / "out",
                          tmp / "out" / "sub" / "map.json");
    FAIL("map inside output accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kInvalidArgument);
  }
  CHECK_FALSE(fs::exists(tmp / "out"));
}

TEST_CASE("stub kind writes the inference result") {
  TempDir tmp;
  write_fixture_series(tmp / "in", 4);
  const auto m = stub_manifest();
  const auto summary = edge::execute_package(m, tmp / "in", tmp / "out", tmp / "map.json");
  CHECK(summary.ok());
  CHECK(summary.outputs == std::vector<std::string>{"result.json"});
  CHECK_FALSE(fs::exists(tmp / "map.json"));

  const auto result = model::InferenceResult::from_json(read_text_file(tmp / "out" / "result.json"));
  const auto direct = model::StubModel(m.params()).infer(model::load_series_dir(tmp / "in").scan);
  CHECK(result.probability == direct.probability);
  CHECK(result.latent == direct.latent);
  CHECK(result.model_name == "stub-racnet");
  CHECK(result.model_version == 3);
}

TEST_CASE("unknown kinds and unreadable inputs") {
  TempDir tmp;
  auto m = stub_manifest();
  m.kind = "external";
  fs::create_directories(tmp / "in");
  try {
    edge::execute_package(m, tmp / "in", tmp / "out", tmp / "map.json");
    FAIL("external kind executed");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kUnknownKind);
  }
  try {
    edge::execute_package(anonymizer_manifest(), tmp / "missing", tmp / "out", tmp / "map.json");
    FAIL("missing input accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kIoError);
  }
}
