/*
 * dicomkit.cpp
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

#include <iostream>

#include "mlpod/dicom/anonymize.hpp"
#include "mlpod/dicom/synthetic.hpp"
#include "mlpod/edge/agent.hpp"
#include "tool_support.hpp"

using namespace mlpod;

int main(int argc, char** argv) {
  CLI::App app{"DICOM anonymization and inspection"};
  app.require_subcommand(1);

  auto* anon = app.add_subcommand("anonymize", "apply a profile to every *.dcm in a directory");
  std::string profile_path, in_dir, out_dir, map_path;
  anon->add_option("--profile", profile_path, "profile JSON")->required()->check(CLI::ExistingFile);
  anon->add_option("--in", in_dir, "input directory")->required()->check(CLI::ExistingDirectory);
  anon->add_option("--out", out_dir, "output directory")->required();
  anon->add_option("--map", map_path, "pseudonym map output (outside --out)")->required();

  auto* synth = app.add_subcommand("synth", "write a synthetic CT series carrying PHI");
  std::string synth_out;
  dicom::SyntheticSeriesOptions so;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--slices", so.slices, "slice count")->check(CLI::Range(1, 4096))->capture_default_str();
  synth->add_option("--rows", so.rows, "rows per slice")->capture_default_str();
  synth->add_option("--columns", so.columns, "columns per slice")->capture_default_str();
  synth->add_option("--seed", so.seed, "noise seed")->capture_default_str();
  synth->add_option("--opacity", so.opacity, "0 clear to 1 heavy ground-glass")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  synth->add_option("--patient-name", so.patient_name)->capture_default_str();
  synth->add_option("--patient-id", so.patient_id)->capture_default_str();

  auto* dump = app.add_subcommand("dump", "print the elements of a DICOM file");
  std::string dump_file;
  dump->add_option("file", dump_file, "DICOM file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  return tools::run_main("dicomkit", [&] {
    if (*anon) {
      const auto profile = dicom::AnonymizationProfile::from_json(read_text_file(profile_path));
      const auto summary = edge::anonymize_directory(profile, in_dir, out_dir, map_path);
      std::cout << summary.to_json() << "\n";
      for (const auto& f : summary.failures) std::cerr << f.file << ": " << f.message << "\n";
      return summary.ok() ? 0 : 1;
    }
    if (*synth) {
      const auto paths = dicom::write_series(synth_out, dicom::synthetic_series(so));
      std::cout << paths.size() << " files written to " << synth_out << "\n";
      return 0;
    }
    std::cout << dicom::dump(dicom::parse_dicom(read_file(dump_file)));
    return 0;
  });
}
