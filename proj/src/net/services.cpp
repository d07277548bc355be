/*
 * services.cpp
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

#include "mlpod/net/services.hpp"

#include "mlpod/common/crypto.hpp"

namespace mlpod::net {
namespace {

constexpr const char* kOctetStream = "application/octet-stream";

std::string path_param(const httplib::Request& req, const char* name) {
  const auto it = req.path_params.find(name);
  if (it == req.path_params.end() || it->second.empty()) {
    fail(Errc::kInvalidArgument, std::string("missing path parameter ") + name);
  }
  return it->second;
}

// Accepts either scope; the error names the first.
void require_any_scope(const auth::Claims& claims, std::string_view a, std::string_view b) {
  if (!claims.has_scope(b)) auth::require_scope(claims, a);
}

std::optional<int> parse_version_selector(const std::string& text) {
  if (text == "latest") return std::nullopt;
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used == text.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  fail(Errc::kInvalidArgument, "version must be a positive integer or \"latest\": " + text);
}

std::vector<std::string> job_inputs(const Json& body) {
  const Json& in = body.at("input");
  if (in.is_string()) return {in.get<std::string>()};
  if (in.is_array() && !in.empty()) return in.get<std::vector<std::string>>();
  fail(Errc::kInvalidArgument, "input must be an object id or a non-empty list of ids");
}

}  // namespace

void mount_health(httplib::Server& server, const std::string& service) {
  server.Get("/healthz", [service](const httplib::Request&, httplib::Response& res) {
    send_json(res, {{"service", service}, {"status", "ok"}});
  });
}

void mount_authpod(httplib::Server& server, const auth::AuthPod& pod) {
  server.Post("/token", [&pod](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::string client_id, client_secret, scope_text;
      std::int64_t ttl = 3600;
      if (req.get_header_value("Content-Type").rfind("application/x-www-form-urlencoded", 0) == 0) {
        client_id = req.get_param_value("client_id");
        client_secret = req.get_param_value("client_secret");
        scope_text = req.get_param_value("scope");
        if (req.has_param("ttl")) ttl = std::stoll(req.get_param_value("ttl"));
      } else {
        const Json body = parse_json_body(req);
        client_id = body.at("client_id").get<std::string>();
        client_secret = body.at("client_secret").get<std::string>();
        scope_text = body.value("scope", "");
        ttl = body.value("ttl", ttl);
      }
      const auto token =
          pod.issue_token(client_id, client_secret, auth::parse_scope_list(scope_text), ttl);
      send_json(res, {{"access_token", token.encoded},
                      {"token_type", "Bearer"},
                      {"expires_in", token.claims.exp - token.claims.iat},
                      {"scope", auth::format_scope_list(token.claims.scopes)}});
    });
  });

  server.Post("/introspect", [&pod](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto caller = authenticate(req, pod.verifier(), [&pod] { return pod.now(); });
      const Json body = parse_json_body(req);
      const auto result = pod.introspect(caller, body.at("token").get<std::string>());
      Json out = {{"active", result.active}};
      if (result.claims) out["claims"] = Json::parse(auth::claims_json(*result.claims));
      send_json(res, out);
    });
  });
}

void mount_datapod(httplib::Server& server, data::DataPod& pod, const auth::TokenVerifier& verifier,
                   Clock clock) {
  server.Put("/objects/:id", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      std::string media_type = req.get_header_value("Content-Type");
      if (media_type.empty()) media_type = kOctetStream;
      const auto put = pod.put_object(path_param(req, "id"), as_bytes(req.body), media_type, claims);
      send_json(res, {{"id", put.id}, {"content_hash", put.content_hash}}, 201);
    });
  });

  server.Get("/objects/:id", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      const auto obj = pod.get_object(path_param(req, "id"), claims);
      res.set_header("X-Content-Hash", obj.content_hash);
      res.set_header("X-Created-At", std::to_string(obj.created_at));
      res.set_content(std::string(obj.bytes.begin(), obj.bytes.end()), obj.media_type);
    });
  });

  server.Get("/objects", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      Json items = Json::array();
      for (const auto& info : pod.list_objects(req.get_param_value("prefix"), claims)) {
        items.push_back({{"id", info.id},
                         {"content_hash", info.content_hash},
                         {"media_type", info.media_type},
                         {"size", info.size}});
      }
      send_json(res, {{"objects", items}});
    });
  });

  server.Put("/anchorsets/:name", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      const std::string name = path_param(req, "name");
      const int version = pod.put_anchor_set(name, req.body, claims);
      send_json(res, {{"name", name}, {"version", version}}, 201);
    });
  });

  server.Get("/anchorsets/:name/:version",
             [&, clock](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 const auto claims = authenticate(req, verifier, clock);
                 const auto stored = pod.get_anchor_set(
                     path_param(req, "name"), parse_version_selector(path_param(req, "version")),
                     claims);
                 res.set_header("X-Anchor-Set-Version", std::to_string(stored.version));
                 res.set_content(stored.json, "application/json");
               });
             });

  server.Post("/manifests/validate", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      auth::require_scope(claims, auth::scope::kDataRead);
      const auto report = data::validate_manifest(data::DatasetManifest::from_json(req.body));
      res.set_content(report.to_json(), "application/json");
    });
  });
}

void mount_modelpod(httplib::Server& server, modelpod::ModelPod& pod,
                    const auth::TokenVerifier& verifier, Clock clock) {
  server.Post("/models", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      auth::require_scope(claims, auth::scope::kModelAdmin);
      if (!req.has_file("manifest")) fail(Errc::kInvalidArgument, "multipart part \"manifest\" is required");
      const std::string artifact = req.has_file("artifact") ? req.get_file_value("artifact").content : "";
      const auto record =
          pod.register_model(req.get_file_value("manifest").content, as_bytes(artifact), claims);
      res.status = 201;
      res.set_content(record.to_json(), "application/json");
    });
  });

  server.Get("/models", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      require_any_scope(claims, auth::scope::kModelExecute, auth::scope::kModelAdmin);
      Json models = Json::array();
      for (const auto& r : pod.list_models()) models.push_back(Json::parse(r.to_json()));
      send_json(res, {{"models", models}});
    });
  });

  server.Get("/models/:name/:selector", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      require_any_scope(claims, auth::scope::kModelExecute, auth::scope::kModelAdmin);
      const auto record =
          pod.resolve_model({path_param(req, "name"), path_param(req, "selector")});
      res.set_content(record.to_json(), "application/json");
    });
  });

  server.Post("/models/:name/:selector/package",
              [&, clock](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  const auto claims = authenticate(req, verifier, clock);
                  const Bytes pkg = pod.package_for_edge(
                      {path_param(req, "name"), path_param(req, "selector")}, claims);
                  res.set_content(std::string(pkg.begin(), pkg.end()), kOctetStream);
                });
              });

  server.Post("/jobs", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      auth::require_scope(claims, auth::scope::kModelExecute);
      const Json body = parse_json_body(req);
      const auto ref = modelpod::ModelRef::parse(body.at("model").get<std::string>());
      const std::string id = pod.submit_job(ref, job_inputs(body), claims, bearer_token(req));
      send_json(res, {{"job_id", id}}, 202);
    });
  });

  server.Get("/jobs/:id", [&, clock](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto claims = authenticate(req, verifier, clock);
      require_any_scope(claims, auth::scope::kModelExecute, auth::scope::kModelAdmin);
      res.set_content(pod.get_job(path_param(req, "id"), claims).to_json(), "application/json");
    });
  });
}

modelpod::ObjectFetcher http_object_fetcher(std::string datapod_url) {
  return [url = std::move(datapod_url)](const std::string& id, const std::string& bearer) {
    const auto r = HttpClient(url, bearer).checked_get("/objects/" + url_encode(id));
    return to_bytes(r.body);
  };
}

}  // namespace mlpod::net
