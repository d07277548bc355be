/*
 * modelpod.cpp
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

#include "mlpod/model/package.hpp"
#include "mlpod/modelpod/modelpod.hpp"
#include "mlpod/net/services.hpp"
#include "tool_support.hpp"

using namespace mlpod;

int main(int argc, char** argv) {
  CLI::App app{"Model registry, job runner and edge packager"};
  std::string listen = "127.0.0.1:8083";
  std::string root = env_or("MODELPOD_ROOT", "");
  std::string datapod_url = env_or("DATAPOD_URL", "");
  std::size_t workers = 2;
  tools::TlsFlags tls;
  app.add_option("--listen", listen, "host:port to bind")->capture_default_str();
  app.add_option("--workers", workers, "job worker threads")->check(CLI::Range(1, 64))->capture_default_str();
  app.add_option("--root", root, "registry directory (default $MODELPOD_ROOT)");
  app.add_option("--datapod", datapod_url, "datapod base URL for object inputs (default $DATAPOD_URL)");
  tls.add_to(app);
  CLI11_PARSE(app, argc, argv);

  return tools::run_main("modelpod", [&] {
    if (root.empty()) fail(Errc::kInvalidArgument, "no registry root: pass --root or set MODELPOD_ROOT");
    tools::block_termination_signals();
    const auth::TokenVerifier verifier(key_from_env("MLPOD_SIGNING_KEY", tools::kMinSigningKeyBytes));
    modelpod::ModelPodOptions o;
    o.root = root;
    o.edge_key = key_from_env("MLPOD_EDGE_KEY", model::kMinEdgeKeyBytes);
    o.workers = workers;
    if (!datapod_url.empty()) o.fetch_object = net::http_object_fetcher(datapod_url);
    modelpod::ModelPod pod(std::move(o));
    net::RunningServer server(tls.files());
    net::mount_health(server.server(), "modelpod");
    net::mount_modelpod(server.server(), pod, verifier);
    tools::serve("modelpod", server, listen);
    return 0;
  });
}
