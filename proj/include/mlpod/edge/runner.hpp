/*
 * runner.hpp
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

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mlpod/common/crypto.hpp"
#include "mlpod/common/error.hpp"
#include "mlpod/edge/agent.hpp"

namespace mlpod::edge {

struct AgentOptions {
  std::string logic_url;
  std::string run_id;
  std::filesystem::path in;
  std::filesystem::path out;
  std::optional<std::filesystem::path> package_file;
  // Defaults to "<out>.pseudonym-map.json" next to the output directory.
  std::optional<std::filesystem::path> map_path;
  std::string token;
  Bytes edge_key;
  std::vector<std::chrono::milliseconds> retry_delays = {std::chrono::milliseconds(500),
                                                         std::chrono::milliseconds(1000),
                                                         std::chrono::milliseconds(2000)};
  std::chrono::milliseconds claim_wait = std::chrono::seconds(60);
  std::chrono::milliseconds claim_poll = std::chrono::milliseconds(250);
};

enum ExitCode : int {
  kExitOk = 0,
  kExitExecutionFailed = 1,  // validation or execution failure, reported to logicpod
  kExitUsage = 2,            // missing token, unusable directories
  kExitNetwork = 3,          // retries exhausted or a pod refused a request
};

struct AgentOutcome {
  int exit_code = kExitOk;
  std::string message;
  std::optional<ExecutionSummary> summary;
  std::vector<std::string> uploaded;  // datapod object ids
};

// Calls fn, retrying Errc::kUnavailable failures after each delay in turn.
template <typename Fn>
auto with_retries(const std::vector<std::chrono::milliseconds>& delays, Fn&& fn) -> decltype(fn()) {
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      return fn();
    } catch (const Error& e) {
      if (e.code() != Errc::kUnavailable || attempt >= delays.size()) throw;
      std::this_thread::sleep_for(delays[attempt]);
    }
  }
}

// Claims the run's edge step from logicpod, validates the package, executes
// it, uploads the output directory to datapod under the claim's prefix, and
// reports completion. The pseudonym map is never uploaded.
AgentOutcome run_agent(const AgentOptions& options);

}  // namespace mlpod::edge
