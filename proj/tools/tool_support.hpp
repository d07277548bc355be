/*
 * tool_support.hpp
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

#include <csignal>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mlpod/common/error.hpp"
#include "mlpod/net/http.hpp"

namespace mlpod::tools {

inline constexpr std::size_t kMinSigningKeyBytes = 32;

struct TlsFlags {
  std::string cert;
  std::string key;

  void add_to(CLI::App& app) {
    auto* c = app.add_option("--tls-cert", cert, "PEM certificate; serve HTTPS")->check(CLI::ExistingFile);
    auto* k = app.add_option("--tls-key", key, "PEM private key")->check(CLI::ExistingFile);
    c->needs(k);
    k->needs(c);
  }
  std::optional<net::TlsFiles> files() const {
    if (cert.empty()) return std::nullopt;
    return net::TlsFiles{cert, key};
  }
};

// Blocks SIGINT and SIGTERM in the calling thread. Call before any server
// thread starts so they inherit the mask.
inline void block_termination_signals() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
}

inline int wait_for_termination_signal() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  int sig = 0;
  sigwait(&set, &sig);
  return sig;
}

// Starts the server, prints the bound address, and serves until SIGINT or
// SIGTERM.
inline void serve(const std::string& name, net::RunningServer& server, const std::string& listen) {
  server.start(net::ListenAddress::parse(listen));
  std::fprintf(stderr, "%s listening on %s\n", name.c_str(), server.base_url().c_str());
  const int sig = wait_for_termination_signal();
  std::fprintf(stderr, "%s: signal %d, shutting down\n", name.c_str(), sig);
  server.stop();
}

// Runs body, printing mlpod errors to stderr. Invalid arguments exit 2,
// anything else 1.
inline int run_main(const std::string& name, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    std::fprintf(stderr, "%s: %s\n", name.c_str(), e.what());
    return e.code() == Errc::kInvalidArgument ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: %s\n", name.c_str(), e.what());
    return 1;
  }
}

}  // namespace mlpod::tools
