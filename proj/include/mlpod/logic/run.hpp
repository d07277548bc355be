/*
 * run.hpp
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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace mlpod::logic {

using Json = nlohmann::json;

enum class RunState { kCreated, kRunning, kCompleted, kFailed };
enum class StepState { kPending, kWaitingEdge, kRunning, kDone, kFailed };

std::string_view run_state_name(RunState s);
std::string_view step_state_name(StepState s);
std::optional<RunState> parse_run_state(std::string_view s);
std::optional<StepState> parse_step_state(std::string_view s);

inline bool is_terminal(RunState s) { return s == RunState::kCompleted || s == RunState::kFailed; }
inline bool is_terminal(StepState s) { return s == StepState::kDone || s == StepState::kFailed; }

// One entry of a run's append-only log. Run-level events have an empty step.
//   run  CREATED    data {pipeline_id, owner, inputs, steps: {id: env}}
//   step RUNNING    data {model, model_version}
//   step DONE       data {outputs: {binding: value}}
//   run  FAILED     detail names the cause
struct RunEvent {
  std::int64_t seq = 0;
  std::int64_t at_ms = 0;
  std::string step;
  std::string state;
  std::string detail;
  Json data = Json::object();

  Json to_json() const;
  static RunEvent from_json(const Json& j);
};

struct StepStatus {
  StepState state = StepState::kPending;
  std::string env;
  std::int64_t started_at_ms = 0;  // first WAITING_EDGE or RUNNING
  std::int64_t ended_at_ms = 0;
  std::string detail;
  std::string model;
  std::optional<int> model_version;

  bool operator==(const StepStatus&) const = default;
};

// Run state is a left fold of its events; nothing else mutates it.
struct RunSnapshot {
  std::string run_id;
  std::string pipeline_id;
  std::string owner;
  RunState state = RunState::kCreated;
  std::map<std::string, StepStatus> steps;
  Json inputs = Json::object();
  std::map<std::string, Json> bindings;  // output id -> bound value
  std::int64_t created_at_ms = 0;
  std::int64_t ended_at_ms = 0;
  std::int64_t last_seq = 0;
  std::string detail;

  // Errors: Errc::kInternal for out-of-order sequence numbers or unknown
  // states and steps.
  void apply(const RunEvent& e);
  Json to_json() const;
};

RunSnapshot replay(const std::string& run_id, const std::vector<RunEvent>& events);

// One JSON object per line, flushed after every append.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path path);
  void append(const RunEvent& e);
  const std::filesystem::path& path() const { return path_; }

  // A torn final line, as left by a crash mid-write, is dropped.
  static std::vector<RunEvent> read(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace mlpod::logic
