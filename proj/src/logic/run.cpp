/*
 * run.cpp
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

#include "mlpod/logic/run.hpp"

#include <array>

#include "mlpod/common/error.hpp"

namespace mlpod::logic {
namespace {

constexpr std::array<std::string_view, 4> kRunStates = {"CREATED", "RUNNING", "COMPLETED", "FAILED"};
constexpr std::array<std::string_view, 5> kStepStates = {"PENDING", "WAITING_EDGE", "RUNNING", "DONE",
                                                         "FAILED"};

}  // namespace

std::string_view run_state_name(RunState s) { return kRunStates[static_cast<std::size_t>(s)]; }
std::string_view step_state_name(StepState s) { return kStepStates[static_cast<std::size_t>(s)]; }

std::optional<RunState> parse_run_state(std::string_view s) {
  for (std::size_t i = 0; i < kRunStates.size(); ++i) {
    if (kRunStates[i] == s) return static_cast<RunState>(i);
  }
  return std::nullopt;
}

std::optional<StepState> parse_step_state(std::string_view s) {
  for (std::size_t i = 0; i < kStepStates.size(); ++i) {
    if (kStepStates[i] == s) return static_cast<StepState>(i);
  }
  return std::nullopt;
}

Json RunEvent::to_json() const {
  Json j = {{"seq", seq}, {"at_ms", at_ms}, {"state", state}};
  if (!step.empty()) j["step"] = step;
  if (!detail.empty()) j["detail"] = detail;
  if (!data.empty()) j["data"] = data;
  return j;
}

RunEvent RunEvent::from_json(const Json& j) {
  RunEvent e;
  e.seq = j.at("seq").get<std::int64_t>();
  e.at_ms = j.at("at_ms").get<std::int64_t>();
  e.state = j.at("state").get<std::string>();
  e.step = j.value("step", "");
  e.detail = j.value("detail", "");
  if (j.contains("data")) e.data = j.at("data");
  return e;
}

void RunSnapshot::apply(const RunEvent& e) {
  if (e.seq <= last_seq) {
    fail(Errc::kInternal, "event " + std::to_string(e.seq) + " does not follow " + std::to_string(last_seq));
  }
  last_seq = e.seq;
  if (e.step.empty()) {
    const auto s = parse_run_state(e.state);
    if (!s) fail(Errc::kInternal, "unknown run state " + e.state);
    state = *s;
    if (state == RunState::kCreated) {
      pipeline_id = e.data.value("pipeline_id", "");
      owner = e.data.value("owner", "");
      inputs = e.data.value("inputs", Json::object());
      created_at_ms = e.at_ms;
      const Json step_envs = e.data.value("steps", Json::object());
      for (const auto& [id, env] : step_envs.items()) {
        steps[id].env = env.get<std::string>();
      }
    }
    if (is_terminal(state)) {
      ended_at_ms = e.at_ms;
      detail = e.detail;
    }
    return;
  }
  const auto it = steps.find(e.step);
  if (it == steps.end()) fail(Errc::kInternal, "event for unknown step " + e.step);
  const auto s = parse_step_state(e.state);
  if (!s) fail(Errc::kInternal, "unknown step state " + e.state);
  StepStatus& step = it->second;
  step.state = *s;
  if ((*s == StepState::kWaitingEdge || *s == StepState::kRunning) && step.started_at_ms == 0) {
    step.started_at_ms = e.at_ms;
  }
  if (e.data.contains("model")) step.model = e.data["model"].get<std::string>();
  if (e.data.contains("model_version")) step.model_version = e.data["model_version"].get<int>();
  if (is_terminal(*s)) {
    step.ended_at_ms = e.at_ms;
    step.detail = e.detail;
  }
  if (*s == StepState::kDone) {
    const Json outputs = e.data.value("outputs", Json::object());
    for (const auto& [id, value] : outputs.items()) bindings[id] = value;
  }
}

Json RunSnapshot::to_json() const {
  Json s = Json::object();
  for (const auto& [id, st] : steps) {
    Json j = {{"state", step_state_name(st.state)},
              {"env", st.env},
              {"started_at_ms", st.started_at_ms},
              {"ended_at_ms", st.ended_at_ms}};
    if (!st.detail.empty()) j["detail"] = st.detail;
    if (!st.model.empty()) j["model"] = st.model;
    if (st.model_version) j["model_version"] = *st.model_version;
    s[id] = j;
  }
  Json j = {{"run_id", run_id},
            {"pipeline_id", pipeline_id},
            {"state", run_state_name(state)},
            {"steps", s},
            {"inputs", inputs},
            {"created_at_ms", created_at_ms},
            {"ended_at_ms", ended_at_ms},
            {"last_seq", last_seq}};
  if (!detail.empty()) j["detail"] = detail;
  return j;
}

RunSnapshot replay(const std::string& run_id, const std::vector<RunEvent>& events) {
  RunSnapshot s;
  s.run_id = run_id;
  for (const auto& e : events) s.apply(e);
  return s;
}

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {
  std::filesystem::create_directories(path_.parent_path());
  out_.open(path_, std::ios::app | std::ios::binary);
  if (!out_) fail(Errc::kIoError, "cannot open event log " + path_.string());
}

void EventLog::append(const RunEvent& e) {
  out_ << e.to_json().dump() << '\n';
  out_.flush();
  if (!out_) fail(Errc::kIoError, "cannot append to " + path_.string());
}

std::vector<RunEvent> EventLog::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kIoError, "cannot read event log " + path.string());
  std::vector<RunEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      fail(Errc::kParseError, "corrupt event log " + path.string());
    }
    events.push_back(RunEvent::from_json(j));
  }
  return events;
}

}  // namespace mlpod::logic
