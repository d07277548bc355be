/*
 * cluster.hpp
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

// All four pods on ephemeral loopback ports inside one process, plus helpers
// to register models, publish an anchor set, and drive the edge agent.

#include <memory>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "json.hpp"
#include "mlpod/anchor/engine.hpp"
#include "mlpod/data/anchor_doc.hpp"
#include "mlpod/dicom/anonymize.hpp"
#include "mlpod/dicom/synthetic.hpp"
#include "mlpod/edge/runner.hpp"
#include "mlpod/logic/http.hpp"
#include "mlpod/model/series.hpp"
#include "mlpod/net/services.hpp"

namespace mlpod::testing {

inline const Bytes& test_edge_key() {
  static const Bytes key = to_bytes("edge-key-for-tests-0123456789abcdef!!");
  return key;
}

inline std::string canonical_ml2() {
  return R"(<ml2 name="covid-detect"><inputs><input id="scan" kind="dicom-series" required="true"/></inputs>)"
         R"(<models><model id="anon" service="modelpod" name="anonymizer" version="latest"/>)"
         R"(<model id="racnet" service="modelpod" name="stub-racnet" version="latest"/></models>)"
         R"(<pipeline><step id="s1" model="anon" env="edge"><in bind="scan"/><out id="clean"/></step>)"
         R"(<step id="s2" model="racnet" env="cloud" depends-on="s1"><in bind="clean"/><out id="result"/></step>)"
         R"(</pipeline><render title="Covid19 Report"><section kind="probability" source="result"/>)"
         R"(<section kind="similar-slices" source="result"/></render></ml2>)";
}

inline std::string stub_manifest_json(std::uint64_t seed, double threshold = 0.5) {
  return nlohmann::json{{"name", "stub-racnet"}, {"kind", "stub"}, {"L", 64}, {"F", 16},
                        {"seed", seed},          {"threshold", threshold}}
      .dump();
}

inline std::string anonymizer_manifest_json() {
  const auto profile = dicom::AnonymizationProfile::defaults(to_bytes("cluster-test-salt"));
  return nlohmann::json{{"name", "anonymizer"}, {"kind", "anonymizer"},
                        {"profile", nlohmann::json::parse(profile.to_json())}}
      .dump();
}

struct ClusterOptions {
  std::chrono::milliseconds step_timeout = std::chrono::seconds(300);
  bool anchor_set = true;
};

class Cluster {
 public:
  explicit Cluster(ClusterOptions options = {}) {
    authpod_ = std::make_unique<auth::AuthPod>(auth::ClientRegistry::from_json(R"({"clients":[
        {"client_id":"logicpod","client_secret":"lp-secret",
         "scopes":["data:read","data:write","model:execute","model:dispatch"]},
        {"client_id":"doctor","client_secret":"doc-secret","scopes":["app:access","data:read","data:write"]},
        {"client_id":"admin","client_secret":"admin-secret","scopes":["model:admin","data:read","data:write"]}]})"),
                                               test_signing_key());
    net::mount_health(auth_server_.server(), "authpod");
    net::mount_authpod(auth_server_.server(), *authpod_);
    auth_server_.start({});

    datapod_ = std::make_unique<data::DataPod>(dir_ / "datapod");
    net::mount_health(data_server_.server(), "datapod");
    net::mount_datapod(data_server_.server(), *datapod_, verifier_);
    data_server_.start({});

    modelpod::ModelPodOptions mo;
    mo.root = dir_ / "modelpod";
    mo.edge_key = test_edge_key();
    mo.fetch_object = net::http_object_fetcher(data_server_.base_url());
    modelpod_ = std::make_unique<modelpod::ModelPod>(std::move(mo));
    net::mount_health(model_server_.server(), "modelpod");
    net::mount_modelpod(model_server_.server(), *modelpod_, verifier_);
    model_server_.start({});

    logic::LogicPodOptions lo;
    lo.root = dir_ / "logicpod";
    lo.config.services = {{"authpod", auth_server_.base_url()},
                          {"datapod", data_server_.base_url()},
                          {"modelpod", model_server_.base_url()}};
    if (options.anchor_set) lo.config.anchor_set = logic::AnchorSetRef{"covid-anchors", "latest"};
    lo.token_source = logic::client_credentials_source(auth_server_.base_url(), "logicpod", "lp-secret",
                                                       "data:read data:write model:execute model:dispatch");
    lo.default_step_timeout = options.step_timeout;
    logic_options_ = lo;
    start_logicpod();
  }

  ~Cluster() { stop_logicpod(); }

  // Simulates a logicpod restart against the same state directory.
  void restart_logicpod() {
    stop_logicpod();
    start_logicpod();
  }
  void stop_logicpod() {
    logic_server_.reset();
    logicpod_.reset();
  }
  void start_logicpod() {
    logicpod_ = std::make_unique<logic::LogicPod>(logic_options_);
    logic_server_ = std::make_unique<net::RunningServer>();
    logic::mount_logicpod(logic_server_->server(), *logicpod_, verifier_);
    logic_server_->start({});
  }

  std::string token(const std::string& client, const std::string& scopes) const {
    static const std::map<std::string, std::string> secrets = {
        {"logicpod", "lp-secret"}, {"doctor", "doc-secret"}, {"admin", "admin-secret"}};
    const nlohmann::json body = {{"client_id", client}, {"client_secret", secrets.at(client)},
                                 {"scope", scopes}, {"ttl", 600}};
    return net::HttpClient(auth_server_.base_url()).checked_post("/token", body.dump()).json()["access_token"];
  }
  std::string doctor_token() const { return token("doctor", "app:access data:read data:write"); }
  std::string admin_token() const { return token("admin", "model:admin data:read data:write"); }

  net::HttpClient logic(const std::string& bearer) const { return net::HttpClient(logic_server_->base_url(), bearer); }
  net::HttpClient data(const std::string& bearer) const { return net::HttpClient(data_server_.base_url(), bearer); }
  net::HttpClient model(const std::string& bearer) const { return net::HttpClient(model_server_.base_url(), bearer); }

  int register_model(const std::string& manifest_json) const {
    const auto r = net::HttpClient::check(model(admin_token()).post_multipart(
        "/models", {{"manifest", manifest_json, "manifest.json", "application/json"},
                    {"artifact", "", "artifact.bin", "application/octet-stream"}}));
    return r.json()["version"];
  }

  // Registers the anonymizer and stub model (seed 42) and publishes an
  // anchor set built from the stub's latents over synthetic series.
  void provision(std::uint64_t stub_seed = 42) {
    register_model(anonymizer_manifest_json());
    register_model(stub_manifest_json(stub_seed));
    publish_anchor_set(stub_seed);
  }

  void publish_anchor_set(std::uint64_t stub_seed) const {
    model::ModelParams params{64, 16, stub_seed};
    const model::StubModel stub(params);
    const auto writer = data(admin_token());
    std::vector<anchor::LatentRecord> records;
    for (int i = 0; i < 8; ++i) {
      dicom::SyntheticSeriesOptions so;
      so.slices = 4;
      so.seed = 100 + static_cast<std::uint64_t>(i);
      so.opacity = i < 4 ? 0.0 : 0.9;
      std::vector<std::pair<std::string, Bytes>> files;
      for (const auto& obj : dicom::synthetic_series(so)) {
        files.emplace_back("slice-" + std::to_string(files.size()) + ".dcm", dicom::serialize_dicom(obj));
      }
      const auto series = model::load_series(files);
      const auto result = stub.infer(series.scan);
      anchor::LatentRecord rec;
      rec.latent = result.latent;
      rec.label = i < 4 ? anchor::Label::kNonCovid : anchor::Label::kCovid;
      rec.slice_features = result.slice_features;
      for (std::size_t s = 0; s < series.scan.slices.size(); ++s) {
        const std::string id = "anchor-images.case" + std::to_string(i) + ".slice" + std::to_string(s) + ".pgm";
        writer.checked_put("/objects/" + id, pgm(series.scan.slices[s]), "image/x-portable-graymap");
        rec.representative_images.push_back(id);
      }
      records.push_back(std::move(rec));
    }
    data::AnchorSetDocument doc;
    doc.set = anchor::generate_anchors(records, 2, 7, "covid-anchors");
    doc.provenance = {"stub-racnet", std::to_string(stub_seed), "2026-01-01T00:00:00Z"};
    writer.checked_put("/anchorsets/covid-anchors", data::serialize_anchor_set_document(doc), "application/json");
  }

  std::string register_pipeline(const std::string& xml = canonical_ml2()) const {
    return logic(doctor_token()).checked_post("/pipelines", xml, "application/xml").json()["pipeline_id"];
  }

  std::string start_run(const std::string& pipeline_id) const {
    const nlohmann::json body = {{"pipeline_id", pipeline_id}, {"inputs", {{"scan", "edge:local"}}}};
    return logic(doctor_token()).checked_post("/runs", body.dump()).json()["run_id"];
  }

  // Writes a synthetic series with PHI into a fresh local directory.
  std::filesystem::path write_series(const std::string& name, std::size_t slices = 16,
                                     std::uint64_t seed = 1) const {
    dicom::SyntheticSeriesOptions so;
    so.slices = slices;
    so.seed = seed;
    const auto path = dir_ / name;
    dicom::write_series(path, dicom::synthetic_series(so));
    return path;
  }

  edge::AgentOptions agent_options(const std::string& run_id, const std::filesystem::path& in,
                                   const std::string& out_name) const {
    edge::AgentOptions o;
    o.logic_url = logic_server_->base_url();
    o.run_id = run_id;
    o.in = in;
    o.out = dir_ / out_name;
    o.token = doctor_token();
    o.edge_key = test_edge_key();
    o.claim_wait = std::chrono::seconds(10);
    o.claim_poll = std::chrono::milliseconds(20);
    return o;
  }

  nlohmann::json wait_for_run(const std::string& run_id, std::chrono::milliseconds timeout) const {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    const auto client = logic(doctor_token());
    nlohmann::json run;
    do {
      run = client.checked_get("/runs/" + run_id).json();
      if (run["state"] == "COMPLETED" || run["state"] == "FAILED") return run;
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    } while (std::chrono::steady_clock::now() < deadline);
    return run;
  }

  const std::filesystem::path& dir() const { return dir_.path(); }
  std::string datapod_url() const { return data_server_.base_url(); }
  std::string logic_url() const { return logic_server_->base_url(); }
  data::DataPod& datapod() { return *datapod_; }
  modelpod::ModelPod& modelpod() { return *modelpod_; }
  logic::LogicPod& logicpod() { return *logicpod_; }
  net::RunningServer& model_server() { return model_server_; }

  static std::string pgm(const model::Slice& slice) {
    std::string out = "P5\n" + std::to_string(slice.width) + " " + std::to_string(slice.height) + "\n255\n";
    for (const auto v : slice.pixels) out.push_back(static_cast<char>(v >> 4));
    return out;
  }

 private:
  TempDir dir_;
  auth::TokenVerifier verifier_{test_signing_key()};
  std::unique_ptr<auth::AuthPod> authpod_;
  std::unique_ptr<data::DataPod> datapod_;
  std::unique_ptr<modelpod::ModelPod> modelpod_;
  std::unique_ptr<logic::LogicPod> logicpod_;
  logic::LogicPodOptions logic_options_;
  net::RunningServer auth_server_, data_server_, model_server_;
  std::unique_ptr<net::RunningServer> logic_server_;
};

}  // namespace mlpod::testing
