/*
 * http.cpp
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

#include "mlpod/logic/http.hpp"

#include <algorithm>
#include <filesystem>

#include "mlpod/net/services.hpp"

namespace mlpod::logic {
namespace {

constexpr const char* kAppPlaceholder =
    "<!doctype html><html><head><title>MLPod</title></head><body>"
    "<h1>MLPod</h1><p>The web application is not installed. Set app_dir in the logicpod "
    "configuration to the directory holding its build output.</p></body></html>";

std::int64_t int_param(const httplib::Request& req, const char* name, std::int64_t fallback) {
  if (!req.has_param(name)) return fallback;
  const std::string text = req.get_param_value(name);
  try {
    std::size_t used = 0;
    const std::int64_t v = std::stoll(text, &used);
    if (used == text.size() && v >= 0) return v;
  } catch (const std::exception&) {
  }
  fail(Errc::kInvalidArgument, std::string(name) + " must be a non-negative integer");
}

Json pipeline_json(const PipelineInfo& p) {
  return {{"pipeline_id", p.id}, {"name", p.name}, {"stages", p.stages}};
}

}  // namespace

void mount_logicpod(httplib::Server& server, LogicPod& pod, const auth::TokenVerifier& verifier,
                    Clock clock) {
  using net::authenticate;
  using net::guarded;
  using net::send_json;

  net::mount_health(server, "logicpod");

  server.Post("/pipelines", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      send_json(res, pipeline_json(pod.register_pipeline(req.body, claims)), 201);
    });
  });

  server.Get("/pipelines/:id", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      send_json(res, pipeline_json(pod.get_pipeline(req.path_params.at("id"), claims)));
    });
  });

  server.Post("/runs", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      auth::require_scope(claims, auth::scope::kAppAccess);
      const Json body = net::parse_json_body(req);
      const std::string run_id = pod.start_run(body.at("pipeline_id").get<std::string>(),
                                               body.value("inputs", Json::object()), claims);
      send_json(res, {{"run_id", run_id}}, 201);
    });
  });

  server.Get("/runs/:id", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      send_json(res, pod.get_run(req.path_params.at("id"), claims).to_json());
    });
  });

  server.Get("/runs/:id/events", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      const std::string& id = req.path_params.at("id");
      const std::int64_t after = int_param(req, "after", 0);
      const std::int64_t wait = std::min(int_param(req, "wait", 0), kMaxEventWaitMs);
      Json events = Json::array();
      for (const auto& e : pod.events(id, after, std::chrono::milliseconds(wait), claims)) {
        events.push_back(e.to_json());
      }
      const auto snapshot = pod.get_run(id, claims);
      send_json(res, {{"run_id", id},
                      {"state", run_state_name(snapshot.state)},
                      {"last_seq", snapshot.last_seq},
                      {"events", events}});
    });
  });

  server.Get("/runs/:id/report", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      send_json(res, pod.report(req.path_params.at("id"), claims).to_json());
    });
  });

  server.Get("/services", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      auth::require_scope(claims, auth::scope::kAppAccess);
      send_json(res, {{"services", pod.discover_services()}});
    });
  });

  server.Post("/edge/claim", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      std::optional<std::string> run_id;
      if (!req.body.empty()) {
        const Json body = net::parse_json_body(req);
        if (body.contains("run_id")) run_id = body["run_id"].get<std::string>();
      }
      const auto work = pod.claim_edge_work(run_id, claims);
      if (!work) {
        res.status = 204;
        return;
      }
      send_json(res, work->to_json());
    });
  });

  server.Post("/edge/complete", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      auth::require_scope(claims, auth::scope::kAppAccess);
      pod.complete_edge_work(EdgeCompletion::from_json(net::parse_json_body(req)), claims);
      send_json(res, {{"accepted", true}});
    });
  });

  const std::string& app_dir = pod.config().app_dir;
  std::error_code ec;
  if (!app_dir.empty() && std::filesystem::is_directory(app_dir, ec)) {
    server.set_mount_point("/app", app_dir);
  } else {
    server.Get("/app", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kAppPlaceholder, "text/html");
    });
  }
}

}  // namespace mlpod::logic
