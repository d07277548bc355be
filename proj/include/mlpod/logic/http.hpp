/*
 * http.hpp
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

#include "mlpod/logic/logicpod.hpp"
#include "mlpod/net/http.hpp"

namespace mlpod::logic {

// POST /pipelines, GET /pipelines/{id}, POST /runs, GET /runs/{id},
// GET /runs/{id}/events?after=seq&wait=ms, GET /runs/{id}/report,
// GET /services, POST /edge/claim, POST /edge/complete, GET /healthz, and
// the static route /app.
void mount_logicpod(httplib::Server& server, LogicPod& pod, const auth::TokenVerifier& verifier,
                    Clock clock = system_clock());

// Upper bound on the events long-poll.
inline constexpr std::int64_t kMaxEventWaitMs = 30000;

}  // namespace mlpod::logic
