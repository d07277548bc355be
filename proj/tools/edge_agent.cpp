/*
 * edge_agent.cpp
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

#include "mlpod/edge/runner.hpp"
#include "mlpod/model/package.hpp"
#include "tool_support.hpp"

using namespace mlpod;

int main(int argc, char** argv) {
  CLI::App app{"Runs a dispatched edge step on this machine"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "claim, validate, execute, upload and complete one edge step");

  edge::AgentOptions o;
  std::string token_ref;
  std::string map_path;
  std::string package_file;
  run->add_option("--logic", o.logic_url, "logicpod base URL")->required();
  run->add_option("--run-id", o.run_id, "run whose edge step to claim")->required();
  run->add_option("--in", o.in, "directory of local DICOM files")->required()->check(CLI::ExistingDirectory);
  run->add_option("--out", o.out, "empty or absent directory for outputs")->required();
  run->add_option("--package", package_file, "signed package file to use instead of the one from logicpod")
      ->check(CLI::ExistingFile);
  run->add_option("--token", token_ref, "env:VAR naming the variable holding the bearer token")->required();
  run->add_option("--map", map_path, "pseudonym map path (default <out>.pseudonym-map.json)");
  CLI11_PARSE(app, argc, argv);

  if (token_ref.rfind("env:", 0) != 0 || token_ref.size() == 4) {
    std::fprintf(stderr, "edge-agent: --token must have the form env:VAR\n");
    return edge::kExitUsage;
  }
  o.token = env_or(token_ref.substr(4).c_str(), "");
  if (!package_file.empty()) o.package_file = package_file;
  if (!map_path.empty()) o.map_path = map_path;

  return tools::run_main("edge-agent", [&] {
    o.edge_key = key_from_env("MLPOD_EDGE_KEY", model::kMinEdgeKeyBytes);
    const auto outcome = edge::run_agent(o);
    if (outcome.summary) std::printf("%s\n", outcome.summary->to_json().c_str());
    std::fprintf(stderr, "edge-agent: %s\n", outcome.message.c_str());
    return outcome.exit_code;
  });
}
