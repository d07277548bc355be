/*
 * datapod.cpp
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

#include "mlpod/data/datapod.hpp"
#include "mlpod/net/services.hpp"
#include "tool_support.hpp"

using namespace mlpod;

int main(int argc, char** argv) {
  CLI::App app{"Object and anchor-set store"};
  std::string listen = "127.0.0.1:8082";
  std::string root = env_or("DATAPOD_ROOT", "");
  tools::TlsFlags tls;
  app.add_option("--listen", listen, "host:port to bind")->capture_default_str();
  app.add_option("--root", root, "storage directory (default $DATAPOD_ROOT)");
  tls.add_to(app);
  CLI11_PARSE(app, argc, argv);

  return tools::run_main("datapod", [&] {
    if (root.empty()) fail(Errc::kInvalidArgument, "no storage root: pass --root or set DATAPOD_ROOT");
    tools::block_termination_signals();
    const auth::TokenVerifier verifier(key_from_env("MLPOD_SIGNING_KEY", tools::kMinSigningKeyBytes));
    data::DataPod pod(root);
    net::RunningServer server(tls.files());
    net::mount_health(server.server(), "datapod");
    net::mount_datapod(server.server(), pod, verifier);
    tools::serve("datapod", server, listen);
    return 0;
  });
}
