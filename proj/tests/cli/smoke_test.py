#!/usr/bin/env python3
# smoke_test.py
#
# This source file is part of the MLPod Sandbox open source project
#
# Copyright 2026 The MLPod Sandbox Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Starts the four pod binaries, drives one run through the edge-agent CLI,
and checks dicomkit and anchorgen on their own."""

import base64
import json
import os
import random
import shutil
import signal
import socket
import subprocess
import sys
import tempfile
import time
import urllib.error
import urllib.request

BIN, SRC = sys.argv[1], sys.argv[2]
failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def request(method, url, body=None, token=None, content_type="application/json"):
    headers = {}
    if token:
        headers["Authorization"] = "Bearer " + token
    if body is not None:
        headers["Content-Type"] = content_type
        if isinstance(body, str):
            body = body.encode()
    req = urllib.request.Request(url, data=body, method=method, headers=headers)
    try:
        with urllib.request.urlopen(req, timeout=10) as r:
            return r.status, r.read()
    except urllib.error.HTTPError as e:
        return e.code, e.read()


def wait_healthy(url, proc):
    for _ in range(200):
        if proc.poll() is not None:
            return False
        try:
            if request("GET", url + "/healthz")[0] == 200:
                return True
        except OSError:
            pass
        time.sleep(0.05)
    return False


def token(auth_url, client, secret, scope):
    status, body = request("POST", auth_url + "/token",
                           json.dumps({"client_id": client, "client_secret": secret, "scope": scope}))
    assert status == 200, body
    return json.loads(body)["access_token"]


def main():
    tmp = tempfile.mkdtemp(prefix="mlpod-smoke-")
    env = dict(os.environ)
    env["MLPOD_SIGNING_KEY"] = base64.b64encode(b"smoke-signing-key-0123456789abcdefgh").decode()
    env["MLPOD_EDGE_KEY"] = base64.b64encode(b"smoke-edge-key-0123456789abcdefghijk").decode()
    env["LOGICPOD_CLIENT_SECRET"] = "change-me-logicpod"
    ports = {name: free_port() for name in ("authpod", "datapod", "modelpod", "logicpod")}
    urls = {name: "http://127.0.0.1:%d" % p for name, p in ports.items()}

    config = json.load(open(os.path.join(SRC, "config", "logicpod.json")))
    config["services"] = {k: urls[k] for k in ("authpod", "datapod", "modelpod")}
    config["app_dir"] = os.path.join(tmp, "no-webapp")
    config_path = os.path.join(tmp, "logicpod.json")
    json.dump(config, open(config_path, "w"))

    commands = {
        "authpod": ["authpod", "--listen", str(ports["authpod"]),
                    "--clients", os.path.join(SRC, "config", "clients.json")],
        "datapod": ["datapod", "--listen", str(ports["datapod"]), "--root", os.path.join(tmp, "data")],
        "modelpod": ["modelpod", "--listen", str(ports["modelpod"]), "--workers", "2",
                     "--root", os.path.join(tmp, "models"), "--datapod", urls["datapod"]],
        "logicpod": ["logicpod", "--listen", str(ports["logicpod"]), "--config", config_path,
                     "--root", os.path.join(tmp, "logic")],
    }
    procs = {}
    try:
        for name, cmd in commands.items():
            procs[name] = subprocess.Popen([os.path.join(BIN, cmd[0])] + cmd[1:], env=env)
            check(wait_healthy(urls[name], procs[name]), name + " answers /healthz")
        if failures:
            return

        admin = token(urls["authpod"], "admin", "change-me-admin", "model:admin data:read data:write")
        doctor = token(urls["authpod"], "doctor1", "change-me-doctor1", "app:access data:read data:write")
        for model in ("anonymizer", "stub-racnet"):
            r = subprocess.run(["curl", "-s", "-o", "/dev/null", "-w", "%{http_code}",
                                "-H", "Authorization: Bearer " + admin,
                                "-F", "manifest=<" + os.path.join(SRC, "config", "models", model + ".json"),
                                "-F", "artifact=", urls["modelpod"] + "/models"],
                               capture_output=True, text=True)
            check(r.stdout == "201", "register " + model)

        # Anchor set from random 64-dimensional latents through anchorgen.
        rng = random.Random(5)
        latents = os.path.join(tmp, "latents.jsonl")
        with open(latents, "w") as f:
            for i in range(12):
                f.write(json.dumps({"latent": [rng.gauss(0, 1) for _ in range(64)],
                                    "label": "covid" if i % 2 else "non-covid",
                                    "slice_features": [[rng.random() for _ in range(16)] for _ in range(4)]}) + "\n")
        anchors = os.path.join(tmp, "anchors.json")
        r = subprocess.run([os.path.join(BIN, "anchorgen"), "--latents", latents, "--m", "3", "--seed", "7",
                            "--out", anchors, "--name", "covid-anchors", "--model-name", "stub-racnet",
                            "--model-version", "1"])
        check(r.returncode == 0 and len(json.load(open(anchors))["anchors"]) == 3, "anchorgen writes 3 anchors")
        status, _ = request("PUT", urls["datapod"] + "/anchorsets/covid-anchors", open(anchors).read(), admin)
        check(status == 201, "publish anchor set")

        scan = os.path.join(tmp, "scan")
        r = subprocess.run([os.path.join(BIN, "dicomkit"), "synth", "--out", scan, "--slices", "16"])
        check(r.returncode == 0 and len(os.listdir(scan)) == 16, "dicomkit synth writes 16 slices")

        ml2 = open(os.path.join(SRC, "config", "pipelines", "covid-detect.ml2")).read()
        status, body = request("POST", urls["logicpod"] + "/pipelines", ml2, doctor, "application/xml")
        check(status == 201, "register pipeline")
        pipeline_id = json.loads(body)["pipeline_id"]
        status, body = request("POST", urls["logicpod"] + "/runs",
                               json.dumps({"pipeline_id": pipeline_id, "inputs": {"scan": "local"}}), doctor)
        check(status == 201, "start run")
        run_id = json.loads(body)["run_id"]

        agent_env = dict(env, DOCTOR_TOKEN=doctor)
        out = os.path.join(tmp, "anon")
        r = subprocess.run([os.path.join(BIN, "edge-agent"), "run", "--logic", urls["logicpod"], "--run-id", run_id,
                            "--in", scan, "--out", out, "--token", "env:DOCTOR_TOKEN"], env=agent_env)
        check(r.returncode == 0, "edge-agent exits 0")
        check(os.path.exists(out + ".pseudonym-map.json"), "pseudonym map written next to the output")

        run = {}
        for _ in range(200):
            run = json.loads(request("GET", urls["logicpod"] + "/runs/" + run_id, token=doctor)[1])
            if run["state"] in ("COMPLETED", "FAILED"):
                break
            time.sleep(0.05)
        check(run.get("state") == "COMPLETED", "run completes")
        status, body = request("GET", urls["logicpod"] + "/runs/" + run_id + "/report", token=doctor)
        report = json.loads(body) if status == 200 else {}
        check(0.0 <= report.get("probability", -1) <= 1.0, "report probability in [0, 1]")
        check(report.get("anchor_id", "").startswith("a"), "report names an anchor")

        r = subprocess.run([os.path.join(BIN, "edge-agent"), "run", "--logic", urls["logicpod"], "--run-id", run_id,
                            "--in", scan, "--out", os.path.join(tmp, "x"), "--token", "env:NO_SUCH_VAR"],
                           env=agent_env)
        check(r.returncode == 2, "edge-agent without a token exits 2")

        status, body = request("GET", urls["logicpod"] + "/app")
        check(status == 200 and b"<html" in body, "/app is served")

        anon_out = os.path.join(tmp, "anon-cli")
        r = subprocess.run([os.path.join(BIN, "dicomkit"), "anonymize", "--profile",
                            os.path.join(SRC, "config", "anonymization-profile.json"), "--in", scan,
                            "--out", anon_out, "--map", os.path.join(tmp, "cli-map.json")])
        check(r.returncode == 0, "dicomkit anonymize exits 0")
        dumped = subprocess.run([os.path.join(BIN, "dicomkit"), "dump", os.path.join(anon_out, sorted(os.listdir(anon_out))[0])],
                                capture_output=True, text=True).stdout
        check("DOE^JOHN" not in dumped and "ANON-" in dumped, "dicomkit dump shows a pseudonymised file")
    finally:
        for name, p in procs.items():
            if p.poll() is None:
                p.send_signal(signal.SIGINT)
        for name, p in procs.items():
            try:
                code = p.wait(timeout=10)
            except subprocess.TimeoutExpired:
                p.kill()
                code = None
            check(code == 0, name + " exits 0 on SIGINT")
        shutil.rmtree(tmp, ignore_errors=True)


main()
print("%d failure(s)" % len(failures))
sys.exit(1 if failures else 0)
