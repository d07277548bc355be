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

#include "mlpod/logic/logicpod.hpp"

#include <algorithm>
#include <future>

#include "mlpod/common/crypto.hpp"
#include "mlpod/common/error.hpp"
#include "mlpod/data/anchor_doc.hpp"
#include "mlpod/net/http.hpp"

namespace mlpod::logic {
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::string_view kInterrupted = "interrupted by logicpod restart";

bool is_pipeline_id(std::string_view id) {
  return id.size() == 64 && std::all_of(id.begin(), id.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

// Object ids carried by a bound value: a string, a list of strings, or an
// edge output {"objects": [...]}.
std::vector<std::string> object_ids(const std::string& binding, const Json& value) {
  if (value.is_string()) return {value.get<std::string>()};
  if (value.is_array()) return value.get<std::vector<std::string>>();
  if (value.is_object() && value.contains("objects")) {
    return value["objects"].get<std::vector<std::string>>();
  }
  fail(Errc::kInvalidArgument, "binding " + binding + " carries no object ids");
}

std::string seconds_text(std::chrono::milliseconds ms) {
  const auto count = ms.count();
  if (count % 1000 == 0) return std::to_string(count / 1000) + " s";
  return std::to_string(count) + " ms";
}

}  // namespace

LogicConfig LogicConfig::from_json(std::string_view text) {
  const Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail(Errc::kParseError, "logicpod config is not a JSON object");
  LogicConfig c;
  try {
    const Json services = j.value("services", Json::object());
    for (const auto& [name, url] : services.items()) {
      c.services[name] = url.get<std::string>();
    }
    if (j.contains("anchor_set") && !j["anchor_set"].is_null()) {
      const Json& a = j["anchor_set"];
      AnchorSetRef ref;
      ref.name = a.at("name").get<std::string>();
      if (a.contains("version")) {
        ref.version = a["version"].is_number() ? std::to_string(a["version"].get<int>())
                                               : a["version"].get<std::string>();
      }
      c.anchor_set = ref;
    }
    c.signing_key_env = j.value("signing_key_env", c.signing_key_env);
    if (j.contains("client")) {
      c.client = ClientCredentials{j["client"].at("client_id").get<std::string>(),
                                   j["client"].at("client_secret_env").get<std::string>()};
    }
    c.app_dir = j.value("app_dir", "");
  } catch (const Json::exception& e) {
    fail(Errc::kValidationError, std::string("logicpod config: ") + e.what());
  }
  return c;
}

std::string LogicConfig::service_url(const std::string& name) const {
  const auto it = services.find(name);
  if (it == services.end()) fail(Errc::kUnavailable, "no URL configured for service " + name);
  return it->second;
}

TokenSource client_credentials_source(std::string authpod_url, std::string client_id,
                                      std::string client_secret, std::string scopes) {
  struct Cache {
    std::mutex mutex;
    std::string token;
    std::int64_t expires_at = 0;
  };
  auto cache = std::make_shared<Cache>();
  return [=]() {
    std::lock_guard lock(cache->mutex);
    if (!cache->token.empty() && unix_now() + 30 < cache->expires_at) return cache->token;
    const Json body = {{"client_id", client_id}, {"client_secret", client_secret}, {"scope", scopes},
                       {"ttl", 3600}};
    const Json r = net::HttpClient(authpod_url).checked_post("/token", body.dump()).json();
    cache->token = r.at("access_token").get<std::string>();
    cache->expires_at = unix_now() + r.at("expires_in").get<std::int64_t>();
    return cache->token;
  };
}

Json EdgeWork::to_json() const {
  Json j = {{"run_id", run_id},           {"step_id", step_id},
            {"claim_id", claim_id},       {"model", {{"name", model_name}, {"version", model_version}}},
            {"datapod_url", datapod_url}, {"output_prefix", output_prefix},
            {"inputs", inputs}};
  if (package_b64) j["package_b64"] = *package_b64;
  if (!package_error.empty()) j["package_error"] = package_error;
  return j;
}

EdgeWork EdgeWork::from_json(const Json& j) {
  EdgeWork w;
  w.run_id = j.at("run_id").get<std::string>();
  w.step_id = j.at("step_id").get<std::string>();
  w.claim_id = j.at("claim_id").get<std::string>();
  w.model_name = j.at("model").at("name").get<std::string>();
  w.model_version = j.at("model").value("version", 0);
  if (j.contains("package_b64")) w.package_b64 = j["package_b64"].get<std::string>();
  w.package_error = j.value("package_error", "");
  w.datapod_url = j.at("datapod_url").get<std::string>();
  w.output_prefix = j.at("output_prefix").get<std::string>();
  w.inputs = j.value("inputs", Json::object());
  return w;
}

EdgeCompletion EdgeCompletion::from_json(const Json& j) {
  EdgeCompletion c;
  c.run_id = j.at("run_id").get<std::string>();
  c.step_id = j.at("step_id").get<std::string>();
  c.claim_id = j.at("claim_id").get<std::string>();
  c.ok = j.at("ok").get<bool>();
  c.outputs = j.value("outputs", std::vector<std::string>{});
  c.summary = j.value("summary", Json::object());
  c.error = j.value("error", "");
  return c;
}

LogicPod::LogicPod(LogicPodOptions options) : options_(std::move(options)) {
  fs::create_directories(options_.root / "pipelines");
  fs::create_directories(options_.root / "runs");
  recover();
}

LogicPod::~LogicPod() {
  stopping_ = true;
  std::vector<std::shared_ptr<Run>> runs;
  {
    std::lock_guard lock(runs_mutex_);
    for (auto& [id, run] : runs_) runs.push_back(run);
  }
  for (auto& run : runs) {
    {
      std::lock_guard lock(run->mutex);
    }
    run->changed.notify_all();
  }
  for (auto& run : runs) {
    if (run->worker.joinable()) run->worker.join();
  }
}

std::string LogicPod::service_token() const {
  return options_.token_source ? options_.token_source() : std::string{};
}

void LogicPod::recover() {
  for (const auto& entry : fs::directory_iterator(options_.root / "runs")) {
    if (entry.path().extension() != ".jsonl") continue;
    auto run = std::make_shared<Run>();
    const std::string id = entry.path().stem().string();
    run->events = EventLog::read(entry.path());
    run->snapshot = replay(id, run->events);
    run->log = std::make_unique<EventLog>(entry.path());
    try {
      run->pipeline = load_pipeline(run->snapshot.pipeline_id);
    } catch (const Error&) {
    }
    if (!is_terminal(run->snapshot.state)) {
      std::lock_guard lock(run->mutex);
      for (const auto& [step_id, status] : run->snapshot.steps) {
        if (status.state == StepState::kWaitingEdge || status.state == StepState::kRunning) {
          append_locked(*run, step_id, step_state_name(StepState::kFailed), std::string(kInterrupted));
        }
      }
      append_locked(*run, "", run_state_name(RunState::kFailed), std::string(kInterrupted));
    }
    runs_[id] = run;
  }
}

std::shared_ptr<const LogicPod::Pipeline> LogicPod::load_pipeline(const std::string& id) const {
  if (!is_pipeline_id(id)) fail(Errc::kNotFound, "unknown pipeline " + id);
  std::lock_guard lock(pipelines_mutex_);
  if (const auto it = pipelines_.find(id); it != pipelines_.end()) return it->second;
  const fs::path path = options_.root / "pipelines" / (id + ".ml2");
  if (!fs::exists(path)) fail(Errc::kNotFound, "unknown pipeline " + id);
  auto p = std::make_shared<Pipeline>();
  p->plan = ml2::compile(ml2::parse(read_text_file(path)));
  p->info = {id, p->plan.doc.name, p->plan.stages};
  pipelines_[id] = p;
  return p;
}

PipelineInfo LogicPod::register_pipeline(std::string_view ml2_xml, const auth::Claims& claims) {
  auth::require_scope(claims, auth::scope::kAppAccess);
  const ml2::Document doc = ml2::parse(ml2_xml);
  const auto diagnostics = ml2::validate(doc, options_.config.services);
  if (!diagnostics.empty()) {
    std::string message;
    for (const auto& d : diagnostics) message += (message.empty() ? "" : "\n") + d.str();
    fail(Errc::kValidationError, message);
  }
  auto p = std::make_shared<Pipeline>();
  p->plan = ml2::compile(doc);
  const std::string id = sha256_hex(as_bytes(ml2_xml));
  p->info = {id, doc.name, p->plan.stages};

  std::lock_guard lock(pipelines_mutex_);
  const fs::path path = options_.root / "pipelines" / (id + ".ml2");
  if (!fs::exists(path)) write_file_atomic(path, as_bytes(ml2_xml));
  pipelines_.try_emplace(id, p);
  return pipelines_[id]->info;
}

PipelineInfo LogicPod::get_pipeline(const std::string& id, const auth::Claims& claims) const {
  auth::require_scope(claims, auth::scope::kAppAccess);
  return load_pipeline(id)->info;
}

std::shared_ptr<LogicPod::Run> LogicPod::find_run(const std::string& run_id) const {
  std::lock_guard lock(runs_mutex_);
  const auto it = runs_.find(run_id);
  if (it == runs_.end()) fail(Errc::kNotFound, "unknown run " + run_id);
  return it->second;
}

void LogicPod::append_locked(Run& run, const std::string& step, std::string_view state,
                             std::string detail, Json data) {
  RunEvent e;
  e.seq = run.snapshot.last_seq + 1;
  e.at_ms = unix_now_ms();
  e.step = step;
  e.state = std::string(state);
  e.detail = std::move(detail);
  e.data = std::move(data);
  run.log->append(e);
  run.snapshot.apply(e);
  run.events.push_back(std::move(e));
  run.changed.notify_all();
}

void LogicPod::append(Run& run, const std::string& step, std::string_view state, std::string detail,
                      Json data) {
  std::lock_guard lock(run.mutex);
  append_locked(run, step, state, std::move(detail), std::move(data));
}

std::string LogicPod::start_run(const std::string& pipeline_id, const Json& inputs,
                                const auth::Claims& claims) {
  auth::require_scope(claims, auth::scope::kAppAccess);
  const auto pipeline = load_pipeline(pipeline_id);
  if (!inputs.is_object()) fail(Errc::kInvalidArgument, "inputs must be an object");
  const ml2::Document& doc = pipeline->plan.doc;
  for (const auto& [name, value] : inputs.items()) {
    const bool declared = std::any_of(doc.inputs.begin(), doc.inputs.end(),
                                      [&](const ml2::Input& in) { return in.id == name; });
    if (!declared) fail(Errc::kInvalidArgument, "pipeline declares no input " + name);
  }
  for (const auto& in : doc.inputs) {
    if (in.required && !inputs.contains(in.id)) {
      fail(Errc::kMissingInput, "missing required input " + in.id);
    }
  }

  auto run = std::make_shared<Run>();
  const std::string run_id = new_ulid();
  run->snapshot.run_id = run_id;
  run->pipeline = pipeline;
  run->log = std::make_unique<EventLog>(options_.root / "runs" / (run_id + ".jsonl"));
  Json steps = Json::object();
  for (const auto& s : doc.steps) steps[s.id] = std::string(ml2::env_name(s.env));
  append(*run, "", run_state_name(RunState::kCreated), {},
         {{"pipeline_id", pipeline_id}, {"owner", claims.sub()}, {"inputs", inputs}, {"steps", steps}});
  {
    std::lock_guard lock(runs_mutex_);
    runs_[run_id] = run;
  }
  append(*run, "", run_state_name(RunState::kRunning));
  run->worker = std::thread([this, run] { orchestrate(run); });
  return run_id;
}

void LogicPod::orchestrate(std::shared_ptr<Run> run) {
  const ml2::ExecutionPlan& plan = run->pipeline->plan;
  for (const auto& stage : plan.stages) {
    std::vector<std::future<bool>> results;
    for (const auto& step_id : stage) {
      const ml2::Step* step = plan.doc.find_step(step_id);
      results.push_back(std::async(std::launch::async, [this, &run, step] { return run_step(*run, *step); }));
    }
    std::vector<std::string> failed;
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (!results[i].get()) failed.push_back(stage[i]);
    }
    // Left in flight; recovery fails the run on the next start.
    if (stopping_) return;
    if (!failed.empty()) {
      std::string detail = "step " + failed[0];
      std::lock_guard lock(run->mutex);
      const auto& status = run->snapshot.steps.at(failed[0]);
      if (!status.detail.empty()) detail += ": " + status.detail;
      append_locked(*run, "", run_state_name(RunState::kFailed), detail);
      return;
    }
  }
  append(*run, "", run_state_name(RunState::kCompleted));
  try {
    auto report = render(*run);
    {
      std::lock_guard lock(run->mutex);
      run->report = report;
    }
    net::HttpClient(options_.config.service_url("datapod"), service_token())
        .checked_put("/objects/" + run->snapshot.run_id + ".report.json", report.to_json().dump(),
                     "application/json");
  } catch (const std::exception&) {
    // GET /runs/{id}/report renders again on demand.
  }
}

bool LogicPod::run_step(Run& run, const ml2::Step& step) {
  const auto timeout = step.timeout_seconds ? std::chrono::milliseconds(*step.timeout_seconds * 1000)
                                            : options_.default_step_timeout;
  const auto deadline = Clock::now() + timeout;
  try {
    if (step.env == ml2::Env::kEdge) {
      run_edge_step(run, step, deadline);
    } else {
      run_cloud_step(run, step, deadline);
    }
    return true;
  } catch (const Error& e) {
    if (stopping_) return false;
    std::string detail = e.what();
    if (e.code() == Errc::kTimeout) detail = "timeout after " + seconds_text(timeout) + " (" + detail + ")";
    append(run, step.id, step_state_name(StepState::kFailed), detail);
  } catch (const std::exception& e) {
    append(run, step.id, step_state_name(StepState::kFailed), e.what());
  }
  return false;
}

Json LogicPod::step_input_values(const Run& run, const ml2::Step& step) const {
  Json values = Json::object();
  for (const auto& b : step.inputs) {
    if (run.snapshot.inputs.contains(b)) {
      values[b] = run.snapshot.inputs[b];
    } else if (const auto it = run.snapshot.bindings.find(b); it != run.snapshot.bindings.end()) {
      values[b] = it->second;
    } else {
      fail(Errc::kMissingInput, "binding " + b + " has no value");
    }
  }
  return values;
}

void LogicPod::run_cloud_step(Run& run, const ml2::Step& step, Clock::time_point deadline) {
  const ml2::Model* m = run.pipeline->plan.doc.find_model(step.model);
  const net::HttpClient modelpod(options_.config.service_url(m->service), service_token());
  // "latest" resolves here, at step start.
  const Json record = modelpod.checked_get("/models/" + net::url_encode(m->name) + "/" + m->version).json();
  const int version = record.at("version").get<int>();
  const double threshold = record.at("manifest").value("threshold", 0.5);
  append(run, step.id, step_state_name(StepState::kRunning), {}, {{"model", m->name}, {"model_version", version}});

  Json values;
  {
    std::lock_guard lock(run.mutex);
    values = step_input_values(run, step);
  }
  std::vector<std::string> ids;
  for (const auto& [binding, value] : values.items()) {
    const auto more = object_ids(binding, value);
    ids.insert(ids.end(), more.begin(), more.end());
  }
  const Json submit = {{"model", m->name + "@" + std::to_string(version)}, {"input", ids}};
  const std::string job_id = modelpod.checked_post("/jobs", submit.dump()).json().at("job_id");

  Json job;
  for (;;) {
    job = modelpod.checked_get("/jobs/" + job_id).json();
    const std::string state = job.at("state");
    if (state == "SUCCEEDED") break;
    if (state == "FAILED") fail(Errc::kInternal, "job " + job_id + " failed: " + job.value("error", ""));
    if (stopping_) fail(Errc::kUnavailable, "logicpod is shutting down");
    if (Clock::now() >= deadline) fail(Errc::kTimeout, "job " + job_id + " still " + state);
    std::this_thread::sleep_for(options_.job_poll_interval);
  }
  const Json value = {{"job_id", job_id},
                      {"model", m->name},
                      {"model_version", version},
                      {"threshold", threshold},
                      {"patient_id", job.value("patient_id", "")},
                      {"result", job.at("result")}};
  Json outputs = Json::object();
  for (const auto& out : step.outputs) outputs[out] = value;
  append(run, step.id, step_state_name(StepState::kDone), {},
         {{"outputs", outputs}, {"job_id", job_id}});
}

void LogicPod::run_edge_step(Run& run, const ml2::Step& step, Clock::time_point deadline) {
  const ml2::Model* m = run.pipeline->plan.doc.find_model(step.model);
  std::unique_lock lock(run.mutex);
  EdgeSlot& slot = run.edge[step.id];
  slot.claim_id = new_ulid();
  slot.deadline = deadline;
  append_locked(run, step.id, step_state_name(StepState::kWaitingEdge), {}, {{"model", m->name}});

  const bool finished = run.changed.wait_until(lock, deadline, [&] {
    return stopping_ || run.edge.at(step.id).completion.has_value();
  });
  const EdgeSlot done = run.edge.at(step.id);
  run.edge.erase(step.id);
  if (!finished || !done.completion) {
    if (stopping_) fail(Errc::kUnavailable, "logicpod is shutting down");
    fail(Errc::kTimeout, done.claimed ? "edge agent did not report back" : "no edge agent claimed the step");
  }
  const EdgeCompletion& c = *done.completion;
  if (!c.ok) fail(Errc::kInternal, "edge execution failed: " + c.error);
  const Json value = {{"objects", c.outputs}, {"summary", c.summary}};
  Json outputs = Json::object();
  for (const auto& out : step.outputs) outputs[out] = value;
  append_locked(run, step.id, step_state_name(StepState::kDone), {}, {{"outputs", outputs}});
}

std::optional<EdgeWork> LogicPod::claim_edge_work(const std::optional<std::string>& run_id,
                                                  const auth::Claims& claims) {
  auth::require_scope(claims, auth::scope::kAppAccess);
  std::vector<std::shared_ptr<Run>> candidates;
  if (run_id) {
    candidates.push_back(find_run(*run_id));
  } else {
    std::lock_guard lock(runs_mutex_);
    for (const auto& [id, run] : runs_) candidates.push_back(run);
  }
  for (const auto& run : candidates) {
    EdgeWork work;
    const ml2::Model* m = nullptr;
    {
      std::lock_guard lock(run->mutex);
      for (auto& [step_id, slot] : run->edge) {
        if (slot.claimed || slot.completion) continue;
        slot.claimed = true;
        const ml2::Step* step = run->pipeline->plan.doc.find_step(step_id);
        m = run->pipeline->plan.doc.find_model(step->model);
        work.run_id = run->snapshot.run_id;
        work.step_id = step_id;
        work.claim_id = slot.claim_id;
        work.model_name = m->name;
        work.output_prefix = work.run_id + "." + step_id + ".";
        work.inputs = step_input_values(*run, *step);
        break;
      }
    }
    if (!m) continue;

    work.datapod_url = options_.config.service_url("datapod");
    try {
      const net::HttpClient modelpod(options_.config.service_url(m->service), service_token());
      const Json record =
          modelpod.checked_get("/models/" + net::url_encode(m->name) + "/" + m->version).json();
      work.model_version = record.at("version").get<int>();
      const auto pkg = modelpod.checked_post(
          "/models/" + net::url_encode(m->name) + "/" + std::to_string(work.model_version) + "/package", "");
      work.package_b64 = base64_encode(as_bytes(pkg.body));
    } catch (const Error& e) {
      work.package_error = e.what();
    }

    std::lock_guard lock(run->mutex);
    const auto it = run->edge.find(work.step_id);
    if (it == run->edge.end() || it->second.claim_id != work.claim_id) continue;  // timed out meanwhile
    Json data = {{"model", work.model_name}, {"claimed_by", claims.sub()}};
    if (work.model_version > 0) data["model_version"] = work.model_version;
    append_locked(*run, work.step_id, step_state_name(StepState::kRunning), {}, data);
    return work;
  }
  return std::nullopt;
}

void LogicPod::complete_edge_work(const EdgeCompletion& done, const auth::Claims& claims) {
  auth::require_scope(claims, auth::scope::kAppAccess);
  const auto run = find_run(done.run_id);
  std::lock_guard lock(run->mutex);
  const auto it = run->edge.find(done.step_id);
  if (it == run->edge.end() || !it->second.claimed || it->second.claim_id != done.claim_id) {
    fail(Errc::kNotFound, "no outstanding claim " + done.claim_id + " for step " + done.step_id);
  }
  if (it->second.completion) fail(Errc::kInvalidArgument, "claim " + done.claim_id + " already completed");
  const std::string prefix = done.run_id + "." + done.step_id + ".";
  for (const auto& id : done.outputs) {
    if (id.rfind(prefix, 0) != 0) {
      fail(Errc::kInvalidArgument, "output " + id + " is outside the run prefix " + prefix);
    }
  }
  it->second.completion = done;
  run->changed.notify_all();
}

RunSnapshot LogicPod::get_run(const std::string& run_id, const auth::Claims& claims) const {
  auth::require_scope(claims, auth::scope::kAppAccess);
  const auto run = find_run(run_id);
  std::lock_guard lock(run->mutex);
  return run->snapshot;
}

std::vector<RunEvent> LogicPod::events(const std::string& run_id, std::int64_t after,
                                       std::chrono::milliseconds wait,
                                       const auth::Claims& claims) const {
  auth::require_scope(claims, auth::scope::kAppAccess);
  const auto run = find_run(run_id);
  std::unique_lock lock(run->mutex);
  run->changed.wait_for(lock, wait, [&] {
    return stopping_ || run->snapshot.last_seq > after || is_terminal(run->snapshot.state);
  });
  std::vector<RunEvent> out;
  for (const auto& e : run->events) {
    if (e.seq > after) out.push_back(e);
  }
  return out;
}

std::optional<RunSnapshot> LogicPod::wait_for_run(const std::string& run_id,
                                                  std::chrono::milliseconds timeout) const {
  const auto run = find_run(run_id);
  std::unique_lock lock(run->mutex);
  if (!run->changed.wait_for(lock, timeout, [&] { return is_terminal(run->snapshot.state); })) {
    return std::nullopt;
  }
  return run->snapshot;
}

DiagnosisReport LogicPod::report(const std::string& run_id, const auth::Claims& claims) {
  auth::require_scope(claims, auth::scope::kAppAccess);
  const auto run = find_run(run_id);
  {
    std::lock_guard lock(run->mutex);
    if (run->snapshot.state != RunState::kCompleted) {
      fail(Errc::kRunNotCompleted, "run " + run_id + " is " + std::string(run_state_name(run->snapshot.state)));
    }
    if (run->report) return *run->report;
  }
  auto r = render(*run);
  std::lock_guard lock(run->mutex);
  if (!run->report) run->report = r;
  return *run->report;
}

DiagnosisReport LogicPod::render(const Run& run) const {
  RunSnapshot snap;
  {
    std::lock_guard lock(run.mutex);
    snap = run.snapshot;
  }
  if (!run.pipeline) fail(Errc::kNotFound, "pipeline " + snap.pipeline_id + " is no longer available");
  const ml2::ExecutionPlan& plan = run.pipeline->plan;

  // The first render source bound to an inference result, else the last
  // such binding in stage order.
  const Json* source = nullptr;
  if (plan.doc.render) {
    for (const auto& section : plan.doc.render->sections) {
      const auto it = snap.bindings.find(section.source);
      if (it != snap.bindings.end() && it->second.contains("result")) {
        source = &it->second;
        break;
      }
    }
  }
  if (!source) {
    for (const auto& stage : plan.stages) {
      for (const auto& step_id : stage) {
        for (const auto& out : plan.doc.find_step(step_id)->outputs) {
          const auto it = snap.bindings.find(out);
          if (it != snap.bindings.end() && it->second.contains("result")) source = &it->second;
        }
      }
    }
  }
  if (!source) fail(Errc::kValidationError, "run " + snap.run_id + " bound no inference result");

  ReportInputs in;
  in.run_id = snap.run_id;
  in.title = plan.doc.render ? plan.doc.render->title : plan.doc.name;
  in.result = model::InferenceResult::from_json((*source)["result"].dump());
  in.patient_pseudo_id = source->value("patient_id", "");
  in.threshold = source->value("threshold", 0.5);
  for (const auto& stage : plan.stages) {
    for (const auto& step_id : stage) {
      const StepStatus& st = snap.steps.at(step_id);
      in.trace.push_back({step_id, st.env, st.ended_at_ms - st.started_at_ms, st.model,
                          st.model_version.value_or(0)});
    }
  }
  if (options_.config.anchor_set) {
    const auto& ref = *options_.config.anchor_set;
    try {
      const auto doc = net::HttpClient(options_.config.service_url("datapod"), service_token())
                           .checked_get("/anchorsets/" + net::url_encode(ref.name) + "/" + ref.version);
      in.anchors = data::parse_anchor_set_document(doc.body).set;
    } catch (const Error&) {
      // Rendered below as a degraded report.
    }
  }
  return render_report(in);
}

Json LogicPod::discover_services() const {
  std::vector<std::pair<std::string, std::future<bool>>> probes;
  for (const auto& [name, url] : options_.config.services) {
    probes.emplace_back(name, std::async(std::launch::async, [url = url, t = options_.health_timeout] {
                          try {
                            return net::HttpClient(url, {}, t).get("/healthz").status == 200;
                          } catch (const Error&) {
                            return false;
                          }
                        }));
  }
  Json out = Json::object();
  for (auto& [name, probe] : probes) {
    out[name] = {{"url", options_.config.services.at(name)}, {"healthy", probe.get()}};
  }
  return out;
}

}  // namespace mlpod::logic
