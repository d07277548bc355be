/*
 * services.hpp
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

#include <string>

#include "mlpod/auth/authpod.hpp"
#include "mlpod/data/datapod.hpp"
#include "mlpod/modelpod/modelpod.hpp"
#include "mlpod/net/http.hpp"

namespace mlpod::net {

// GET /healthz -> {"service": name, "status": "ok"}. Unauthenticated.
void mount_health(httplib::Server& server, const std::string& service);

// POST /token, POST /introspect.
void mount_authpod(httplib::Server& server, const auth::AuthPod& pod);

// PUT/GET /objects/{id}, GET /objects?prefix=, PUT /anchorsets/{name},
// GET /anchorsets/{name}/{version|latest}, POST /manifests/validate.
void mount_datapod(httplib::Server& server, data::DataPod& pod,
                   const auth::TokenVerifier& verifier, Clock clock = system_clock());

// POST /models, GET /models, GET /models/{name}/{selector}, POST /jobs,
// GET /jobs/{id}, POST /models/{name}/{selector}/package.
void mount_modelpod(httplib::Server& server, modelpod::ModelPod& pod,
                    const auth::TokenVerifier& verifier, Clock clock = system_clock());

// Reads objects from a datapod over HTTP with the caller's bearer token.
modelpod::ObjectFetcher http_object_fetcher(std::string datapod_url);

}  // namespace mlpod::net
