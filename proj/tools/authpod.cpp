/*
 * authpod.cpp
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

#include "mlpod/auth/authpod.hpp"
#include "mlpod/net/services.hpp"
#include "tool_support.hpp"

using namespace mlpod;

int main(int argc, char** argv) {
  CLI::App app{"OAuth2 client-credentials token service"};
  std::string listen = "127.0.0.1:8081";
  std::string clients_file = env_or("MLPOD_CLIENTS_FILE", "");
  tools::TlsFlags tls;
  app.add_option("--listen", listen, "host:port to bind")->capture_default_str();
  app.add_option("--clients", clients_file, "client registry JSON (default $MLPOD_CLIENTS_FILE)");
  tls.add_to(app);
  CLI11_PARSE(app, argc, argv);

  return tools::run_main("authpod", [&] {
    if (clients_file.empty()) fail(Errc::kInvalidArgument, "no client registry: pass --clients or set MLPOD_CLIENTS_FILE");
    tools::block_termination_signals();
    const auth::AuthPod pod(auth::ClientRegistry::load(clients_file),
                            key_from_env("MLPOD_SIGNING_KEY", tools::kMinSigningKeyBytes));
    net::RunningServer server(tls.files());
    net::mount_health(server.server(), "authpod");
    net::mount_authpod(server.server(), pod);
    tools::serve("authpod", server, listen);
    return 0;
  });
}
