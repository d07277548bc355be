/*
 * logicpod.cpp
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

#include "mlpod/logic/http.hpp"
#include "mlpod/logic/logicpod.hpp"
#include "tool_support.hpp"

using namespace mlpod;

int main(int argc, char** argv) {
  CLI::App app{"Pipeline registry and run orchestrator"};
  std::string listen = "127.0.0.1:8080";
  std::string config_path;
  std::string root = env_or("LOGICPOD_ROOT", "logicpod-state");
  std::size_t step_timeout = 300;
  tools::TlsFlags tls;
  app.add_option("--listen", listen, "host:port to bind")->capture_default_str();
  app.add_option("--config", config_path, "configuration JSON")->required()->check(CLI::ExistingFile);
  app.add_option("--root", root, "state directory for pipelines and run logs (default $LOGICPOD_ROOT)")
      ->capture_default_str();
  app.add_option("--step-timeout", step_timeout, "seconds a step may take without its own timeout-seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tls.add_to(app);
  CLI11_PARSE(app, argc, argv);

  return tools::run_main("logicpod", [&] {
    tools::block_termination_signals();
    logic::LogicPodOptions o;
    o.root = root;
    o.config = logic::LogicConfig::from_json(read_text_file(config_path));
    o.default_step_timeout = std::chrono::seconds(step_timeout);
    const auth::TokenVerifier verifier(key_from_env(o.config.signing_key_env.c_str(), tools::kMinSigningKeyBytes));
    if (o.config.client) {
      const auto& c = *o.config.client;
      const char* secret = std::getenv(c.client_secret_env.c_str());
      if (secret == nullptr) fail(Errc::kInvalidArgument, c.client_secret_env + " is not set");
      o.token_source = logic::client_credentials_source(o.config.service_url("authpod"), c.client_id, secret,
                                                        "data:read data:write model:execute model:dispatch");
    }
    logic::LogicPod pod(std::move(o));
    net::RunningServer server(tls.files());
    logic::mount_logicpod(server.server(), pod, verifier);
    tools::serve("logicpod", server, listen);
    return 0;
  });
}
