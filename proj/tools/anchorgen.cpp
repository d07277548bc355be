/*
 * anchorgen.cpp
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

#include <ctime>
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "mlpod/anchor/engine.hpp"
#include "mlpod/data/anchor_doc.hpp"
#include "tool_support.hpp"

using namespace mlpod;
using Json = nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// One JSON record per line: {latent, label, slice_features, representative_images?}.
std::vector<anchor::LatentRecord> read_latents(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::kIoError, "cannot read " + path);
  std::vector<anchor::LatentRecord> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path + ":" + std::to_string(n);
    try {
      const Json j = Json::parse(line);
      anchor::LatentRecord r;
      r.latent = j.at("latent").get<anchor::Vector>();
      const auto label = anchor::parse_label(j.at("label").get<std::string>());
      if (!label) fail(Errc::kParseError, where + ": label must be covid or non-covid");
      r.label = *label;
      r.slice_features = j.value("slice_features", std::vector<anchor::Vector>{});
      r.representative_images = j.value("representative_images", std::vector<std::string>{});
      out.push_back(std::move(r));
    } catch (const Json::exception& e) {
      fail(Errc::kParseError, where + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Builds an anchor set from latent records"};
  std::string latents, out, name = "anchors", model_name, model_version;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  app.add_option("--latents", latents, "JSON-lines latent records")->required()->check(CLI::ExistingFile);
  app.add_option("--m", m, "anchor count")->required()->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "k-means++ seed")->required();
  app.add_option("--out", out, "anchor-set JSON output")->required();
  app.add_option("--name", name, "anchor-set name")->capture_default_str();
  app.add_option("--model-name", model_name, "provenance: model that produced the latents");
  app.add_option("--model-version", model_version, "provenance: its version");
  CLI11_PARSE(app, argc, argv);

  return tools::run_main("anchorgen", [&] {
    const auto records = read_latents(latents);
    if (records.size() < m) {
      fail(Errc::kInvalidArgument,
           std::to_string(records.size()) + " records cannot form " + std::to_string(m) + " anchors");
    }
    data::AnchorSetDocument doc;
    doc.set = anchor::generate_anchors(records, m, seed, name);
    doc.provenance = {model_name, model_version, utc_now()};
    const std::string text = data::serialize_anchor_set_document(doc);
    write_file_atomic(out, to_bytes(text));
    std::cerr << "anchorgen: " << doc.set.size() << " anchors of dimension " << doc.set.dim << " written to "
              << out << "\n";
    return 0;
  });
}
