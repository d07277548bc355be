/*
 * runner.cpp
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

#include "mlpod/edge/runner.hpp"

#include "json.hpp"
#include "mlpod/net/http.hpp"

namespace mlpod::edge {
namespace fs = std::filesystem;
namespace {

using Json = nlohmann::json;

struct Claim {
  std::string run_id;
  std::string step_id;
  std::string claim_id;
  std::string datapod_url;
  std::string output_prefix;
  std::optional<std::string> package_b64;
  std::string package_error;
};

fs::path normalized(const fs::path& p) {
  fs::path n = fs::absolute(p).lexically_normal();
  if (n.filename().empty()) n = n.parent_path();
  return n;
}

std::string media_type_for(const fs::path& name) {
  if (name.extension() == ".dcm") return "application/dicom";
  if (name.extension() == ".json") return "application/json";
  return "application/octet-stream";
}

AgentOutcome outcome(int code, std::string message) {
  AgentOutcome o;
  o.exit_code = code;
  o.message = std::move(message);
  return o;
}

}  // namespace

AgentOutcome run_agent(const AgentOptions& options) {
  if (options.token.empty()) return outcome(kExitUsage, "no access token supplied");
  const fs::path out = normalized(options.out);
  std::error_code ec;
  if (fs::exists(out, ec) && !fs::is_empty(out, ec)) {
    return outcome(kExitUsage, "output directory " + out.string() + " is not empty");
  }
  const fs::path map_path =
      options.map_path ? *options.map_path : out.parent_path() / (out.filename().string() + ".pseudonym-map.json");

  const net::HttpClient logic(options.logic_url, options.token);
  const auto& delays = options.retry_delays;

  // 1. Claim.
  Claim claim;
  try {
    const Json request = {{"run_id", options.run_id}};
    const auto give_up = std::chrono::steady_clock::now() + options.claim_wait;
    for (;;) {
      const auto r = with_retries(delays, [&] { return logic.checked_post("/edge/claim", request.dump()); });
      if (r.status == 200) {
        const Json j = r.json();
        claim.run_id = j.at("run_id");
        claim.step_id = j.at("step_id");
        claim.claim_id = j.at("claim_id");
        claim.datapod_url = j.at("datapod_url");
        claim.output_prefix = j.at("output_prefix");
        if (j.contains("package_b64")) claim.package_b64 = j["package_b64"].get<std::string>();
        claim.package_error = j.value("package_error", "");
        break;
      }
      if (std::chrono::steady_clock::now() >= give_up) {
        return outcome(kExitNetwork, "no edge work for run " + options.run_id);
      }
      std::this_thread::sleep_for(options.claim_poll);
    }
  } catch (const Error& e) {
    return outcome(kExitNetwork, std::string("claim failed: ") + e.what());
  }

  auto report = [&](bool ok, const std::vector<std::string>& outputs, const Json& summary,
                    const std::string& error) {
    const Json body = {{"run_id", claim.run_id}, {"step_id", claim.step_id}, {"claim_id", claim.claim_id},
                       {"ok", ok},               {"outputs", outputs},       {"summary", summary},
                       {"error", error}};
    with_retries(delays, [&] { return logic.checked_post("/edge/complete", body.dump()); });
  };
  auto fail_step = [&](int code, const std::string& message) {
    try {
      report(false, {}, Json::object(), message);
    } catch (const Error& e) {
      return outcome(kExitNetwork, message + "; completion not delivered: " + e.what());
    }
    return outcome(code, message);
  };

  // 2. Validate, before anything touches the filesystem.
  model::ModelManifest manifest;
  try {
    Bytes package;
    if (options.package_file) {
      package = read_file(*options.package_file);
    } else if (claim.package_b64) {
      auto decoded = base64_decode(*claim.package_b64);
      if (!decoded) fail(Errc::kBadSignature, "package is not valid base64");
      package = std::move(*decoded);
    } else {
      fail(Errc::kUnavailable, "no package available: " + claim.package_error);
    }
    manifest = validate_package(package, options.edge_key);
  } catch (const Error& e) {
    return fail_step(kExitExecutionFailed, std::string("package rejected: ") + e.what());
  }

  // 3. Execute.
  ExecutionSummary summary;
  try {
    summary = execute_package(manifest, options.in, out, map_path);
  } catch (const Error& e) {
    return fail_step(kExitExecutionFailed, std::string("execution failed: ") + e.what());
  }

  // 4. Upload exactly the files written to the output directory.
  AgentOutcome result;
  result.summary = summary;
  try {
    const net::HttpClient datapod(claim.datapod_url, options.token);
    for (const auto& name : summary.outputs) {
      const std::string id = claim.output_prefix + name;
      const std::string body = read_text_file(out / name);
      with_retries(delays, [&] { return datapod.checked_put("/objects/" + id, body, media_type_for(name)); });
      result.uploaded.push_back(id);
    }
  } catch (const Error& e) {
    return fail_step(kExitNetwork, std::string("upload failed: ") + e.what());
  }

  // 5. Complete.
  std::string error;
  for (const auto& f : summary.failures) error += (error.empty() ? "" : "; ") + f.file + ": " + f.message;
  try {
    report(summary.ok(), result.uploaded, Json::parse(summary.to_json()), error);
  } catch (const Error& e) {
    result.exit_code = kExitNetwork;
    result.message = std::string("completion not delivered: ") + e.what();
    return result;
  }
  result.exit_code = summary.ok() ? kExitOk : kExitExecutionFailed;
  result.message = summary.ok() ? "ok" : error;
  return result;
}

}  // namespace mlpod::edge
