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

#include "mlpod/modelpod/modelpod.hpp"

#include <algorithm>

#include "json.hpp"
#include "mlpod/common/error.hpp"
#include "mlpod/model/package.hpp"
#include "mlpod/model/series.hpp"

namespace mlpod::modelpod {
namespace fs = std::filesystem;
namespace {

using Json = nlohmann::json;

constexpr std::string_view kFilePrefix = "file:";

bool is_version_number(std::string_view s) {
  return !s.empty() && s.size() <= 9 && s[0] != '0' &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

ModelRef ModelRef::parse(std::string_view text) {
  ModelRef ref;
  const auto at = text.find('@');
  ref.name = std::string(text.substr(0, at));
  if (at != std::string_view::npos) ref.selector = std::string(text.substr(at + 1));
  if (!is_valid_object_id(ref.name)) fail(Errc::kInvalidArgument, "invalid model name: " + ref.name);
  if (ref.selector != "latest" && !is_version_number(ref.selector)) {
    fail(Errc::kInvalidArgument, "model selector must be latest or a version number");
  }
  return ref;
}

std::string ModelRecord::to_json() const {
  return Json{{"name", name},
              {"version", version},
              {"manifest", Json::parse(manifest.to_json())},
              {"artifact_hash", artifact_hash},
              {"registered_at", registered_at}}
      .dump();
}

std::string_view job_state_name(JobState s) {
  switch (s) {
    case JobState::kQueued: return "QUEUED";
    case JobState::kRunning: return "RUNNING";
    case JobState::kSucceeded: return "SUCCEEDED";
    case JobState::kFailed: return "FAILED";
  }
  return "FAILED";
}

bool is_valid_transition(JobState from, JobState to) {
  return (from == JobState::kQueued && to == JobState::kRunning) ||
         (from == JobState::kRunning && (to == JobState::kSucceeded || to == JobState::kFailed));
}

void Job::advance(JobState to) {
  if (!is_valid_transition(state, to)) {
    fail(Errc::kInternal, "illegal job transition " + std::string(job_state_name(state)) + " -> " +
                              std::string(job_state_name(to)));
  }
  state = to;
}

std::string Job::to_json() const {
  Json j = {{"id", id},
            {"owner", owner},
            {"model", model_ref.str()},
            {"inputs", inputs},
            {"state", job_state_name(state)},
            {"submitted_at_ms", submitted_at_ms},
            {"started_at_ms", started_at_ms},
            {"finished_at_ms", finished_at_ms}};
  if (model_version) j["model_version"] = *model_version;
  if (result) j["result"] = Json::parse(result->to_json());
  if (!patient_id.empty()) j["patient_id"] = patient_id;
  if (error) j["error"] = *error;
  return j.dump();
}

ModelPod::ModelPod(ModelPodOptions options) : options_(std::move(options)) {
  if (options_.edge_key.size() < model::kMinEdgeKeyBytes) {
    fail(Errc::kInvalidArgument, "edge key must be at least 32 bytes");
  }
  fs::create_directories(options_.root / "models");
  load_registry();
  const std::size_t n = std::max<std::size_t>(1, options_.workers);
  for (std::size_t i = 0; i < n; ++i) workers_.emplace_back([this] { worker_loop(); });
}

ModelPod::~ModelPod() {
  {
    std::lock_guard<std::mutex> lock(jobs_mutex_);
    stopping_ = true;
  }
  jobs_changed_.notify_all();
  for (auto& t : workers_) t.join();
}

void ModelPod::load_registry() {
  for (const auto& model_dir : fs::directory_iterator(options_.root / "models")) {
    if (!model_dir.is_directory()) continue;
    for (const auto& version_dir : fs::directory_iterator(model_dir.path())) {
      const fs::path record_path = version_dir.path() / "record.json";
      if (!fs::exists(record_path)) continue;
      const Json j = Json::parse(read_text_file(record_path));
      ModelRecord r;
      r.name = j.at("name").get<std::string>();
      r.version = j.at("version").get<int>();
      r.manifest = model::ModelManifest::from_json(j.at("manifest").dump());
      r.artifact_hash = j.at("artifact_hash").get<std::string>();
      r.registered_at = j.at("registered_at").get<std::int64_t>();
      registry_[r.name][r.version] = std::move(r);
    }
  }
}

ModelRecord ModelPod::register_model(std::string_view manifest_json, ByteView artifact,
                                     const auth::Claims& claims) {
  auth::require_scope(claims, auth::scope::kModelAdmin);
  model::ModelManifest manifest = model::ModelManifest::from_json(manifest_json);

  std::unique_lock<std::shared_mutex> lock(registry_mutex_);
  auto& versions = registry_[manifest.name];
  ModelRecord r;
  r.name = manifest.name;
  r.version = versions.empty() ? 1 : versions.rbegin()->first + 1;
  manifest.version = r.version;
  r.manifest = std::move(manifest);
  r.artifact_hash = sha256_hex(artifact);
  r.registered_at = options_.clock();

  const fs::path dir = options_.root / "models" / r.name / std::to_string(r.version);
  write_file_atomic(dir / "artifact.bin", artifact);
  write_file_atomic(dir / "record.json", as_bytes(r.to_json()));
  versions[r.version] = r;
  return r;
}

ModelRecord ModelPod::resolve_model(const ModelRef& ref) const {
  std::shared_lock<std::shared_mutex> lock(registry_mutex_);
  auto it = registry_.find(ref.name);
  if (it == registry_.end() || it->second.empty()) {
    fail(Errc::kNotFound, "no model named " + ref.name);
  }
  if (ref.selector == "latest") return it->second.rbegin()->second;
  const int v = is_version_number(ref.selector) ? std::stoi(ref.selector) : -1;
  auto vit = it->second.find(v);
  if (vit == it->second.end()) fail(Errc::kNotFound, "no model " + ref.str());
  return vit->second;
}

std::vector<ModelRecord> ModelPod::list_models() const {
  std::shared_lock<std::shared_mutex> lock(registry_mutex_);
  std::vector<ModelRecord> out;
  for (const auto& [name, versions] : registry_) {
    for (const auto& [v, r] : versions) out.push_back(r);
  }
  return out;
}

std::string ModelPod::submit_job(const ModelRef& ref, std::vector<std::string> inputs,
                                 const auth::Claims& claims, std::string bearer) {
  auth::require_scope(claims, auth::scope::kModelExecute);
  if (inputs.empty()) fail(Errc::kInvalidArgument, "a job needs at least one input");
  for (const auto& in : inputs) {
    if (in.rfind(kFilePrefix, 0) != 0 && !is_valid_object_id(in)) {
      fail(Errc::kInvalidId, "invalid input reference: " + in);
    }
  }
  Job job;
  job.id = new_ulid();
  job.owner = claims.sub();
  job.model_ref = ref;
  job.inputs = std::move(inputs);
  job.submitted_at_ms = unix_now_ms();

  std::lock_guard<std::mutex> lock(jobs_mutex_);
  if (auto max = claims.limits().max_jobs) {
    const auto active = static_cast<std::uint64_t>(std::count_if(
        jobs_.begin(), jobs_.end(), [&](const auto& kv) {
          return kv.second.owner == job.owner &&
                 (kv.second.state == JobState::kQueued || kv.second.state == JobState::kRunning);
        }));
    if (active >= *max) {
      fail(Errc::kLimitExceeded, "subject " + job.owner + " already has " +
                                     std::to_string(active) + " active jobs (max_jobs " +
                                     std::to_string(*max) + ")");
    }
  }
  const std::string id = job.id;
  input_limits_[id] = claims.limits().max_input_bytes;
  jobs_.emplace(id, std::move(job));
  queue_.push_back({id, std::move(bearer)});
  jobs_changed_.notify_all();
  return id;
}

Job ModelPod::get_job(const std::string& id, const auth::Claims& claims) const {
  const bool admin = claims.has_scope(auth::scope::kModelAdmin);
  if (!admin) auth::require_scope(claims, auth::scope::kModelExecute);
  std::lock_guard<std::mutex> lock(jobs_mutex_);
  auto it = jobs_.find(id);
  if (it == jobs_.end()) fail(Errc::kNotFound, "no job " + id);
  if (it->second.owner != claims.sub() && !admin) {
    fail(Errc::kScopeDenied, "job " + id + " belongs to another subject");
  }
  return it->second;
}

std::optional<Job> ModelPod::wait_for_job(const std::string& id,
                                          std::chrono::milliseconds timeout) const {
  std::unique_lock<std::mutex> lock(jobs_mutex_);
  std::optional<Job> out;
  jobs_changed_.wait_for(lock, timeout, [&] {
    auto it = jobs_.find(id);
    if (it == jobs_.end()) return false;
    if (it->second.state == JobState::kSucceeded || it->second.state == JobState::kFailed) {
      out = it->second;
      return true;
    }
    return false;
  });
  return out;
}

Bytes ModelPod::package_for_edge(const ModelRef& ref, const auth::Claims& claims) const {
  auth::require_scope(claims, auth::scope::kModelDispatch);
  const ModelRecord r = resolve_model(ref);
  return model::seal_package(r.manifest, options_.edge_key, options_.clock());
}

void ModelPod::worker_loop() {
  for (;;) {
    Pending next;
    {
      std::unique_lock<std::mutex> lock(jobs_mutex_);
      jobs_changed_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      next = std::move(queue_.front());
      queue_.pop_front();
    }
    run_job(next);
  }
}

void ModelPod::transition(const std::string& id, JobState to,
                          const std::function<void(Job&)>& fill) {
  {
    std::lock_guard<std::mutex> lock(jobs_mutex_);
    Job& job = jobs_.at(id);
    job.advance(to);
    if (fill) fill(job);
  }
  jobs_changed_.notify_all();
}

std::vector<std::pair<std::string, Bytes>> ModelPod::fetch_inputs(
    const Job& job, const std::string& bearer, std::optional<std::uint64_t> limit) {
  std::vector<std::pair<std::string, Bytes>> files;
  std::uint64_t total = 0;
  auto add = [&](std::string name, Bytes bytes) {
    total += bytes.size();
    if (limit && total > *limit) {
      fail(Errc::kPayloadTooLarge, "inputs exceed the token's max_input_bytes");
    }
    files.emplace_back(std::move(name), std::move(bytes));
  };
  for (const auto& ref : job.inputs) {
    if (ref.rfind(kFilePrefix, 0) == 0) {
      const fs::path path = ref.substr(kFilePrefix.size());
      if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
          if (entry.is_regular_file() && entry.path().extension() == ".dcm") {
            add(entry.path().filename().string(), read_file(entry.path()));
          }
        }
      } else if (fs::is_regular_file(path)) {
        add(path.filename().string(), read_file(path));
      } else {
        fail(Errc::kNotFound, "input not found: " + ref);
      }
      continue;
    }
    if (!options_.fetch_object) fail(Errc::kNotFound, "input not found: " + ref);
    try {
      add(ref, options_.fetch_object(ref, bearer));
    } catch (const Error& e) {
      if (e.code() == Errc::kNotFound) fail(Errc::kNotFound, "input not found: " + ref);
      throw;
    }
  }
  if (files.empty()) fail(Errc::kNotFound, "input not found: no DICOM files");
  return files;
}

void ModelPod::run_job(const Pending& p) {
  Job snapshot;
  std::optional<std::uint64_t> limit;
  {
    std::lock_guard<std::mutex> lock(jobs_mutex_);
    snapshot = jobs_.at(p.job_id);
    limit = input_limits_[p.job_id];
    input_limits_.erase(p.job_id);
  }
  const std::int64_t started = unix_now_ms();
  transition(p.job_id, JobState::kRunning, [&](Job& j) { j.started_at_ms = started; });
  try {
    const ModelRecord record = resolve_model(snapshot.model_ref);
    {
      std::lock_guard<std::mutex> lock(jobs_mutex_);
      jobs_.at(p.job_id).model_version = record.version;
    }
    const auto& manifest = record.manifest;
    if (manifest.kind != "stub") {
      fail(Errc::kUnknownKind, "model kind " + manifest.kind + " has no cloud runtime");
    }
    const auto files = fetch_inputs(snapshot, p.bearer, limit);
    const model::LoadedSeries series = model::load_series(files);
    model::InferenceResult result = model::StubModel(manifest.params()).infer(series.scan);
    result.model_name = record.name;
    result.model_version = record.version;
    transition(p.job_id, JobState::kSucceeded, [&](Job& j) {
      j.result = std::move(result);
      j.patient_id = series.patient_id;
      j.finished_at_ms = unix_now_ms();
    });
  } catch (const std::exception& e) {
    const std::string reason = e.what();
    transition(p.job_id, JobState::kFailed, [&](Job& j) {
      j.error = reason;
      j.finished_at_ms = unix_now_ms();
    });
  }
}

}  // namespace mlpod::modelpod
