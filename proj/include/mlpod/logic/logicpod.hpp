/*
 * logicpod.hpp
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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mlpod/auth/token.hpp"
#include "mlpod/common/util.hpp"
#include "mlpod/logic/report.hpp"
#include "mlpod/logic/run.hpp"
#include "mlpod/ml2/ml2.hpp"

namespace mlpod::logic {

struct AnchorSetRef {
  std::string name;
  std::string version = "latest";
};

struct ClientCredentials {
  std::string client_id;
  std::string client_secret_env;
};

// {"services": {"authpod": url, "datapod": url, "modelpod": url},
//  "anchor_set": {"name": ..., "version": n | "latest"},
//  "signing_key_env": "MLPOD_SIGNING_KEY",
//  "client": {"client_id": ..., "client_secret_env": ...},
//  "app_dir": path}
struct LogicConfig {
  std::map<std::string, std::string> services;
  std::optional<AnchorSetRef> anchor_set;
  std::string signing_key_env = "MLPOD_SIGNING_KEY";
  std::optional<ClientCredentials> client;
  std::string app_dir;

  static LogicConfig from_json(std::string_view text);
  std::string service_url(const std::string& name) const;  // Errc::kUnavailable if absent
};

// Bearer token logicpod presents to datapod and modelpod.
using TokenSource = std::function<std::string()>;

// Client-credentials grant against authpod; the token is reused until
// 30 seconds before it expires.
TokenSource client_credentials_source(std::string authpod_url, std::string client_id,
                                      std::string client_secret, std::string scopes);

struct PipelineInfo {
  std::string id;  // SHA-256 hex of the ML2 bytes
  std::string name;
  std::vector<std::vector<std::string>> stages;
};

struct EdgeWork {
  std::string run_id;
  std::string step_id;
  std::string claim_id;
  std::string model_name;
  int model_version = 0;
  std::optional<std::string> package_b64;  // absent when modelpod could not package
  std::string package_error;
  std::string datapod_url;
  std::string output_prefix;  // "<run_id>.<step_id>."
  Json inputs = Json::object();  // bound values of the step's inputs

  Json to_json() const;
  static EdgeWork from_json(const Json& j);
};

struct EdgeCompletion {
  std::string run_id;
  std::string step_id;
  std::string claim_id;
  bool ok = false;
  std::vector<std::string> outputs;  // datapod object ids
  Json summary = Json::object();
  std::string error;

  static EdgeCompletion from_json(const Json& j);
};

struct LogicPodOptions {
  std::filesystem::path root;
  LogicConfig config;
  TokenSource token_source;
  std::chrono::milliseconds default_step_timeout = std::chrono::seconds(300);
  std::chrono::milliseconds job_poll_interval = std::chrono::milliseconds(25);
  std::chrono::milliseconds health_timeout = std::chrono::seconds(2);
};

class LogicPod {
 public:
  // Replays every run log under root; runs that were in flight are failed.
  explicit LogicPod(LogicPodOptions options);
  ~LogicPod();
  LogicPod(const LogicPod&) = delete;
  LogicPod& operator=(const LogicPod&) = delete;

  // Errors: ml2 parse/schema errors, Errc::kValidationError carrying every
  // diagnostic, Errc::kCycleDetected.
  PipelineInfo register_pipeline(std::string_view ml2_xml, const auth::Claims& claims);
  PipelineInfo get_pipeline(const std::string& id, const auth::Claims& claims) const;

  // Errors: Errc::kNotFound, Errc::kMissingInput.
  std::string start_run(const std::string& pipeline_id, const Json& inputs, const auth::Claims& claims);
  RunSnapshot get_run(const std::string& run_id, const auth::Claims& claims) const;
  // Events with seq > after. Blocks up to `wait` when there are none and the
  // run is still active.
  std::vector<RunEvent> events(const std::string& run_id, std::int64_t after,
                               std::chrono::milliseconds wait, const auth::Claims& claims) const;
  // Errors: Errc::kRunNotCompleted.
  DiagnosisReport report(const std::string& run_id, const auth::Claims& claims);

  // name -> {url, healthy}
  Json discover_services() const;

  std::optional<EdgeWork> claim_edge_work(const std::optional<std::string>& run_id,
                                          const auth::Claims& claims);
  void complete_edge_work(const EdgeCompletion& done, const auth::Claims& claims);

  // Test hook.
  std::optional<RunSnapshot> wait_for_run(const std::string& run_id,
                                          std::chrono::milliseconds timeout) const;

  const LogicConfig& config() const { return options_.config; }

 private:
  struct Pipeline {
    PipelineInfo info;
    ml2::ExecutionPlan plan;
  };
  struct EdgeSlot {
    std::string claim_id;
    bool claimed = false;
    std::optional<EdgeCompletion> completion;
    std::chrono::steady_clock::time_point deadline;
  };
  struct Run {
    mutable std::mutex mutex;
    mutable std::condition_variable changed;
    std::unique_ptr<EventLog> log;
    std::vector<RunEvent> events;
    RunSnapshot snapshot;
    std::shared_ptr<const Pipeline> pipeline;
    std::map<std::string, EdgeSlot> edge;  // step id -> slot, while waiting
    std::optional<DiagnosisReport> report;
    std::thread worker;
  };

  std::shared_ptr<const Pipeline> load_pipeline(const std::string& id) const;
  std::shared_ptr<Run> find_run(const std::string& run_id) const;
  void recover();
  // append_locked requires run.mutex to be held.
  void append_locked(Run& run, const std::string& step, std::string_view state,
                     std::string detail = {}, Json data = Json::object());
  void append(Run& run, const std::string& step, std::string_view state, std::string detail = {},
              Json data = Json::object());
  void orchestrate(std::shared_ptr<Run> run);
  bool run_step(Run& run, const ml2::Step& step);
  void run_cloud_step(Run& run, const ml2::Step& step, std::chrono::steady_clock::time_point deadline);
  void run_edge_step(Run& run, const ml2::Step& step, std::chrono::steady_clock::time_point deadline);
  Json step_input_values(const Run& run, const ml2::Step& step) const;
  DiagnosisReport render(const Run& run) const;
  std::string service_token() const;

  LogicPodOptions options_;
  mutable std::mutex pipelines_mutex_;
  mutable std::map<std::string, std::shared_ptr<const Pipeline>> pipelines_;
  mutable std::mutex runs_mutex_;
  std::map<std::string, std::shared_ptr<Run>> runs_;
  std::atomic<bool> stopping_{false};
};

}  // namespace mlpod::logic
