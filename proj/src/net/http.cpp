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

#include "mlpod/net/http.hpp"

#include <cstdlib>

namespace mlpod::net {

ListenAddress ListenAddress::parse(std::string_view text) {
  ListenAddress a;
  const auto colon = text.rfind(':');
  std::string_view port_text = text;
  if (colon != std::string_view::npos) {
    if (colon > 0) a.host = std::string(text.substr(0, colon));
    port_text = text.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    a.port = std::stoi(std::string(port_text), &used);
    if (used != port_text.size() || a.port < 0 || a.port > 65535) throw std::out_of_range("port");
  } catch (const std::exception&) {
    fail(Errc::kInvalidArgument, "invalid listen address: " + std::string(text));
  }
  return a;
}

RunningServer::RunningServer(std::optional<TlsFiles> tls) {
  if (tls) {
    auto ssl = std::make_unique<httplib::SSLServer>(tls->cert_path.c_str(), tls->key_path.c_str());
    if (!ssl->is_valid()) fail(Errc::kInvalidArgument, "cannot load TLS certificate or key");
    server_ = std::move(ssl);
    tls_ = true;
  } else {
    server_ = std::make_unique<httplib::Server>();
  }
  server_->new_task_queue = [] { return new httplib::ThreadPool(8); };
}

RunningServer::~RunningServer() { stop(); }

int RunningServer::start(const ListenAddress& addr) {
  host_ = addr.host;
  if (addr.port == 0) {
    port_ = server_->bind_to_any_port(addr.host);
  } else {
    port_ = server_->bind_to_port(addr.host, addr.port) ? addr.port : -1;
  }
  if (port_ <= 0) fail(Errc::kUnavailable, "cannot bind " + addr.host + ":" + std::to_string(addr.port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void RunningServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void RunningServer::wait() {
  if (thread_.joinable()) thread_.join();
}

std::string RunningServer::base_url() const {
  return std::string(tls_ ? "https://" : "http://") + host_ + ":" + std::to_string(port_);
}

void send_error(httplib::Response& res, const Error& e) {
  res.status = http_status(e.code());
  res.set_content(Json{{"error", errc_name(e.code())}, {"message", e.what()}}.dump(),
                  "application/json");
}

void send_json(httplib::Response& res, const Json& body, int status) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void guarded(httplib::Response& res, const std::function<void()>& handler) {
  try {
    handler();
  } catch (const Error& e) {
    send_error(res, e);
  } catch (const Json::exception& e) {
    send_error(res, Error(Errc::kInvalidArgument, std::string("malformed request: ") + e.what()));
  } catch (const std::exception& e) {
    send_error(res, Error(Errc::kInternal, e.what()));
  }
}

std::string bearer_token(const httplib::Request& req) {
  const std::string header = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (header.size() <= kPrefix.size() || header.compare(0, kPrefix.size(), kPrefix) != 0) return {};
  return header.substr(kPrefix.size());
}

auth::Claims authenticate(const httplib::Request& req, const auth::TokenVerifier& verifier,
                          const Clock& clock) {
  const std::string token = bearer_token(req);
  if (token.empty()) fail(Errc::kUnauthenticated, "missing bearer token");
  auth::VerifyContext ctx;
  ctx.now = clock();
  if (!req.remote_addr.empty()) ctx.peer_addr = req.remote_addr;
  return verifier.verify_token(token, "", ctx);
}

Json parse_json_body(const httplib::Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    fail(Errc::kInvalidArgument, std::string("request body is not valid JSON: ") + e.what());
  }
}

Json HttpResponse::json() const {
  try {
    return Json::parse(body);
  } catch (const Json::parse_error& e) {
    fail(Errc::kParseError, std::string("response is not valid JSON: ") + e.what());
  }
}

HttpClient::HttpClient(std::string base_url, std::string bearer, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), bearer_(std::move(bearer)), timeout_(timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::unique_ptr<httplib::Client> HttpClient::make() const {
  auto cli = std::make_unique<httplib::Client>(base_url_);
  if (!cli->is_valid()) fail(Errc::kInvalidArgument, "invalid service URL: " + base_url_);
  const auto secs = static_cast<time_t>(timeout_.count() / 1000);
  const auto usecs = static_cast<time_t>((timeout_.count() % 1000) * 1000);
  cli->set_connection_timeout(secs, usecs);
  cli->set_read_timeout(secs, usecs);
  cli->set_write_timeout(secs, usecs);
  if (!bearer_.empty()) cli->set_bearer_token_auth(bearer_);
  if (base_url_.rfind("https://", 0) == 0) {
    if (const char* ca = std::getenv("MLPOD_TLS_CA"); ca && *ca) {
      cli->set_ca_cert_path(ca);
      cli->enable_server_certificate_verification(true);
    } else {
      cli->enable_server_certificate_verification(false);
    }
  }
  return cli;
}

namespace {

HttpResponse convert(const httplib::Result& r, const std::string& what) {
  if (!r) {
    fail(Errc::kUnavailable, what + ": " + httplib::to_string(r.error()));
  }
  return {r->status, r->body, r->get_header_value("Content-Type")};
}

}  // namespace

HttpResponse HttpClient::get(const std::string& path) const {
  return convert(make()->Get(path), "GET " + base_url_ + path);
}

HttpResponse HttpClient::post(const std::string& path, const std::string& body,
                              const std::string& content_type) const {
  return convert(make()->Post(path, body, content_type), "POST " + base_url_ + path);
}

HttpResponse HttpClient::put(const std::string& path, const std::string& body,
                             const std::string& content_type) const {
  return convert(make()->Put(path, body, content_type), "PUT " + base_url_ + path);
}

HttpResponse HttpClient::post_multipart(const std::string& path,
                                        const httplib::MultipartFormDataItems& items) const {
  return convert(make()->Post(path, items), "POST " + base_url_ + path);
}

HttpResponse HttpClient::check(HttpResponse r) {
  if (r.status < 400) return r;
  Errc code = Errc::kInternal;
  std::string message = "HTTP " + std::to_string(r.status);
  try {
    const Json j = Json::parse(r.body);
    code = errc_from_name(j.value("error", ""));
    message = j.value("message", message);
  } catch (const Json::exception&) {
    if (r.status == 404) code = Errc::kNotFound;
    if (r.status == 503) code = Errc::kUnavailable;
  }
  fail(code, message);
}

std::string url_encode(std::string_view text) {
  return httplib::detail::encode_url(std::string(text));
}

}  // namespace mlpod::net
