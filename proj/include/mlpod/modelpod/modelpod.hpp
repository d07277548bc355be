/*
 * modelpod.hpp
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

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "mlpod/auth/token.hpp"
#include "mlpod/common/util.hpp"
#include "mlpod/model/adapter.hpp"

namespace mlpod::modelpod {

struct ModelRef {
  std::string name;
  std::string selector = "latest";  // "latest" or a version number

  // "name", "name@latest" or "name@3".
  static ModelRef parse(std::string_view text);
  std::string str() const { return name + "@" + selector; }
};

struct ModelRecord {
  std::string name;
  int version = 0;
  model::ModelManifest manifest;
  std::string artifact_hash;
  std::int64_t registered_at = 0;

  std::string to_json() const;
};

enum class JobState { kQueued, kRunning, kSucceeded, kFailed };
std::string_view job_state_name(JobState s);
// Only QUEUED -> RUNNING, RUNNING -> SUCCEEDED and RUNNING -> FAILED.
bool is_valid_transition(JobState from, JobState to);

struct Job {
  std::string id;
  std::string owner;
  ModelRef model_ref;
  std::vector<std::string> inputs;
  JobState state = JobState::kQueued;
  std::optional<int> model_version;  // resolved when the job starts
  std::optional<model::InferenceResult> result;
  std::string patient_id;  // PatientID of the scanned series, already pseudonymised upstream
  std::optional<std::string> error;
  std::int64_t submitted_at_ms = 0;
  std::int64_t started_at_ms = 0;
  std::int64_t finished_at_ms = 0;

  // Applies a transition or throws Errc::kInternal.
  void advance(JobState to);
  std::string to_json() const;
};

// Fetches one datapod object on behalf of the job's submitter.
using ObjectFetcher = std::function<Bytes(const std::string& object_id, const std::string& bearer)>;

struct ModelPodOptions {
  std::filesystem::path root;
  Bytes edge_key;
  std::size_t workers = 2;
  Clock clock = system_clock();
  ObjectFetcher fetch_object;  // unset: only file: inputs resolve
};

class ModelPod {
 public:
  explicit ModelPod(ModelPodOptions options);
  ~ModelPod();
  ModelPod(const ModelPod&) = delete;
  ModelPod& operator=(const ModelPod&) = delete;

  ModelRecord register_model(std::string_view manifest_json, ByteView artifact,
                             const auth::Claims& claims);
  // "latest" is resolved at call time. Errors: Errc::kNotFound.
  ModelRecord resolve_model(const ModelRef& ref) const;
  std::vector<ModelRecord> list_models() const;

  // Inputs are datapod object ids, or "file:<path>" naming a local file or
  // a directory of *.dcm files. `bearer` is forwarded to datapod.
  std::string submit_job(const ModelRef& ref, std::vector<std::string> inputs,
                         const auth::Claims& claims, std::string bearer = {});
  // Owners need model:execute; model:admin reads any job.
  Job get_job(const std::string& id, const auth::Claims& claims) const;
  // Test hook: blocks until the job is terminal or the timeout passes.
  std::optional<Job> wait_for_job(const std::string& id, std::chrono::milliseconds timeout) const;

  Bytes package_for_edge(const ModelRef& ref, const auth::Claims& claims) const;

 private:
  struct Pending {
    std::string job_id;
    std::string bearer;
  };

  void load_registry();
  void worker_loop();
  void run_job(const Pending& p);
  void transition(const std::string& id, JobState to, const std::function<void(Job&)>& fill);
  std::vector<std::pair<std::string, Bytes>> fetch_inputs(const Job& job, const std::string& bearer,
                                                          std::optional<std::uint64_t> limit);

  ModelPodOptions options_;

  mutable std::shared_mutex registry_mutex_;
  std::map<std::string, std::map<int, ModelRecord>> registry_;

  mutable std::mutex jobs_mutex_;
  mutable std::condition_variable jobs_changed_;
  std::map<std::string, Job> jobs_;
  std::map<std::string, std::optional<std::uint64_t>> input_limits_;
  std::deque<Pending> queue_;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace mlpod::modelpod
