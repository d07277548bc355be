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

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "mlpod/auth/token.hpp"
#include "mlpod/common/error.hpp"
#include "mlpod/common/util.hpp"

namespace mlpod::net {

using Json = nlohmann::json;

struct ListenAddress {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port

  // "host:port", ":port" or "port".
  static ListenAddress parse(std::string_view text);
};

struct TlsFiles {
  std::string cert_path;
  std::string key_path;
};

// An httplib server listening on a background thread. Routes are added to
// server() before start().
class RunningServer {
 public:
  explicit RunningServer(std::optional<TlsFiles> tls = std::nullopt);
  ~RunningServer();
  RunningServer(const RunningServer&) = delete;
  RunningServer& operator=(const RunningServer&) = delete;

  httplib::Server& server() { return *server_; }
  // Binds, starts serving, and returns the bound port.
  int start(const ListenAddress& addr);
  void stop();
  // Blocks until stop() is called from another thread or a signal handler.
  void wait();

  int port() const { return port_; }
  bool tls() const { return tls_; }
  std::string base_url() const;

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  bool tls_ = false;
  std::string host_;
};

// Writes {"error": wire-name, "message": text} with the code's status.
void send_error(httplib::Response& res, const Error& e);
void send_json(httplib::Response& res, const Json& body, int status = 200);

// Runs a handler, turning mlpod::Error and JSON exceptions into error bodies.
void guarded(httplib::Response& res, const std::function<void()>& handler);

// Verifies the bearer token with no scope requirement and with the
// request's peer address; callers check scopes on the returned claims.
// Errors: Errc::kUnauthenticated when no bearer token is present, or any
// verify_token error.
auth::Claims authenticate(const httplib::Request& req, const auth::TokenVerifier& verifier,
                          const Clock& clock);
std::string bearer_token(const httplib::Request& req);

Json parse_json_body(const httplib::Request& req);

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string content_type;

  Json json() const;
};

// Small client over httplib. Transport failures raise Errc::kUnavailable;
// the checked calls also raise the Errc named in an error body.
class HttpClient {
 public:
  explicit HttpClient(std::string base_url, std::string bearer = {},
                      std::chrono::milliseconds timeout = std::chrono::seconds(10));

  HttpResponse get(const std::string& path) const;
  HttpResponse post(const std::string& path, const std::string& body,
                    const std::string& content_type = "application/json") const;
  HttpResponse put(const std::string& path, const std::string& body,
                   const std::string& content_type = "application/octet-stream") const;
  HttpResponse post_multipart(const std::string& path,
                              const httplib::MultipartFormDataItems& items) const;

  HttpResponse checked_get(const std::string& path) const { return check(get(path)); }
  HttpResponse checked_post(const std::string& path, const std::string& body,
                            const std::string& content_type = "application/json") const {
    return check(post(path, body, content_type));
  }
  HttpResponse checked_put(const std::string& path, const std::string& body,
                           const std::string& content_type = "application/octet-stream") const {
    return check(put(path, body, content_type));
  }

  static HttpResponse check(HttpResponse r);

  const std::string& base_url() const { return base_url_; }
  void set_bearer(std::string bearer) { bearer_ = std::move(bearer); }

 private:
  std::unique_ptr<httplib::Client> make() const;

  std::string base_url_;
  std::string bearer_;
  std::chrono::milliseconds timeout_;
};

std::string url_encode(std::string_view text);

}  // namespace mlpod::net
