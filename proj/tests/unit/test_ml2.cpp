/*
 * test_ml2.cpp
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

#include <algorithm>
#include <functional>
#include <random>

#include "doctest.h"
#include "mlpod/common/error.hpp"
#include "mlpod/common/util.hpp"
#include "mlpod/ml2/ml2.hpp"
#include "ml2_fuzz.hpp"

using namespace mlpod;
using namespace mlpod::ml2;

namespace {

const std::map<std::string, std::string> kRegistry = {
    {"authpod", "http://127.0.0.1:1"}, {"datapod", "http://127.0.0.1:2"}, {"modelpod", "http://127.0.0.1:3"}};

std::string canonical() { return read_text_file(MLPOD_SOURCE_DIR "/config/pipelines/covid-detect.ml2"); }

std::pair<Errc, std::string> error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return {e.code(), e.what()};
  }
  FAIL("expected an error");
  return {Errc::kInternal, ""};
}

Document chain_doc(const std::vector<std::pair<std::string, std::vector<std::string>>>& steps) {
  Document d;
  d.name = "t";
  d.models.push_back({"m", "modelpod", "stub-racnet", "latest", {}});
  for (const auto& [id, deps] : steps) {
    Step s;
    s.id = id;
    s.model = "m";
    s.depends_on = deps;
    d.steps.push_back(s);
  }
  return d;
}

// Longest chain of dependencies ending at each step, by exhaustive path
// enumeration over the explicit depends-on edges.
std::map<std::string, int> longest_chain_levels(const Document& d) {
  std::map<std::string, int> level;
  std::function<int(const std::string&)> depth = [&](const std::string& id) {
    int best = 0;
    for (const auto& dep : d.find_step(id)->depends_on) best = std::max(best, depth(dep) + 1);
    return best;
  };
  for (const auto& s : d.steps) level[s.id] = depth(s.id);
  return level;
}

}  // namespace

TEST_CASE("canonical document parses field by field") {
  const Document d = parse(canonical());
  CHECK(d.name == "covid-detect");
  REQUIRE(d.inputs.size() == 1);
  CHECK(d.inputs[0].id == "scan");
  CHECK(d.inputs[0].kind == InputKind::kDicomSeries);
  CHECK(d.inputs[0].required);
  REQUIRE(d.models.size() == 2);
  CHECK(d.models[0].id == "anon");
  CHECK(d.models[0].service == "modelpod");
  CHECK(d.models[0].name == "anonymizer");
  CHECK(d.models[0].version == "latest");
  CHECK(d.models[1].name == "stub-racnet");
  REQUIRE(d.steps.size() == 2);
  CHECK(d.steps[0].id == "s1");
  CHECK(d.steps[0].model == "anon");
  CHECK(d.steps[0].env == Env::kEdge);
  CHECK(d.steps[0].inputs == std::vector<std::string>{"scan"});
  CHECK(d.steps[0].outputs == std::vector<std::string>{"clean"});
  CHECK(d.steps[0].depends_on.empty());
  CHECK(d.steps[1].env == Env::kCloud);
  CHECK(d.steps[1].depends_on == std::vector<std::string>{"s1"});
  CHECK(d.steps[1].outputs == std::vector<std::string>{"result"});
  REQUIRE(d.render.has_value());
  CHECK(d.render->title == "Covid19 Report");
  REQUIRE(d.render->sections.size() == 2);
  CHECK(d.render->sections[0].kind == SectionKind::kProbability);
  CHECK(d.render->sections[1].kind == SectionKind::kSimilarSlices);
  CHECK(d.render->sections[1].source == "result");
  CHECK(d.steps[1].where.line == 14);

  CHECK(validate(d, kRegistry).empty());
  const auto plan = compile(d);
  CHECK(plan.stages == std::vector<std::vector<std::string>>{{"s1"}, {"s2"}});
  CHECK(plan.producers.at("clean") == "s1");
}

TEST_CASE("minimal documents") {
  const Document d = parse(R"(<ml2 name="x"/>)");
  CHECK(d.name == "x");
  CHECK(d.steps.empty());
  CHECK(compile(d).stages.empty());
  CHECK(parse("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<!-- c --><ml2 name=\"x\"></ml2>") == d);
}

TEST_CASE("schema errors carry locations") {
  auto [code, msg] = error_of([] {
    parse("<ml2 name=\"x\">\n  <pipeline>\n    <step id=\"a\" model=\"m\" env=\"fog\"/>\n  </pipeline>\n</ml2>");
  });
  CHECK(code == Errc::kSchemaError);
  CHECK(msg.find("env must be cloud|edge") != std::string::npos);
  CHECK(msg.rfind("3:5:", 0) == 0);

  CHECK(error_of([] { parse(R"(<ml2 name="x"><extra/></ml2>)"); }).first == Errc::kSchemaError);
  CHECK(error_of([] { parse(R"(<ml2 name="x" color="red"/>)"); }).first == Errc::kSchemaError);
  CHECK(error_of([] { parse(R"(<ml2/>)"); }).first == Errc::kSchemaError);
  CHECK(error_of([] { parse(R"(<pipeline/>)"); }).first == Errc::kSchemaError);
  CHECK(error_of([] { parse(R"(<ml2 name="x"><step id="a" model="m" env="edge"/></ml2>)"); }).first == Errc::kSchemaError);
  CHECK(error_of([] { parse(R"(<ml2 name="x"><inputs/><inputs/></ml2>)"); }).first == Errc::kSchemaError);
  CHECK(error_of([] { parse(R"(<ml2 name="x">hello</ml2>)"); }).first == Errc::kSchemaError);
  CHECK(error_of([] { parse(R"(<!DOCTYPE ml2><ml2 name="x"/>)"); }).first == Errc::kSchemaError);
  CHECK(error_of([] { parse(R"(<ml2 name="x"><models><model id="m" service="s" name="n" version="v2"/></models></ml2>)"); }).first == Errc::kSchemaError);
  CHECK(error_of([] { parse(R"(<ml2 name="x"><render><section kind="chart" source="r"/></render></ml2>)"); }).first == Errc::kSchemaError);
  CHECK(error_of([] { parse(R"(<ml2 name="x"><inputs><input id="a b" kind="object"/></inputs></ml2>)"); }).first == Errc::kSchemaError);
}

TEST_CASE("malformed XML") {
  auto [code, msg] = error_of([] { parse("<ml2 name=\"x\">\n<inputs>\n</ml2>"); });
  CHECK(code == Errc::kParseError);
  CHECK(msg.rfind("3:", 0) == 0);
  CHECK(error_of([] { parse(""); }).first == Errc::kParseError);
  CHECK(error_of([] { parse("<ml2 name='x'/><ml2 name='y'/>"); }).first == Errc::kParseError);
}

TEST_CASE("validate diagnostics") {
  std::string nosuch = canonical();
  nosuch.replace(nosuch.find("service=\"modelpod\""), 18, "service=\"nosuch\"");
  auto diags = validate(parse(nosuch), kRegistry);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("nosuch") != std::string::npos);
  CHECK(diags[0].where.line == 6);

  std::string unbound = canonical();
  unbound.replace(unbound.find("kind=\"similar-slices\" source=\"result\""), 37,
                  "kind=\"similar-slices\" source=\"nothing\"");
  diags = validate(parse(unbound), kRegistry);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].message.find("nothing") != std::string::npos);

  CHECK(validate(parse(canonical()), {}).size() == 2);

  Document d = parse(canonical());
  d.steps[1].model = "ghost";
  d.steps[0].inputs = {"clean"};
  d.steps.push_back(d.steps[1]);
  diags = validate(d, kRegistry);
  // ghost model twice, duplicate step id, duplicate binding, scan unconsumed
  CHECK(diags.size() == 5);
}

TEST_CASE("compile layering") {
  auto chain = compile(chain_doc({{"A", {}}, {"B", {"A"}}, {"C", {"B"}}}));
  CHECK(chain.stages == std::vector<std::vector<std::string>>{{"A"}, {"B"}, {"C"}});

  auto join = compile(chain_doc({{"A", {}}, {"B", {}}, {"C", {"A", "B"}}}));
  CHECK(join.stages == std::vector<std::vector<std::string>>{{"A", "B"}, {"C"}});

  // Brute force: every topological order of {A,B,C} places C last, and A, B
  // have no dependencies, so the minimal layering is {A,B} then {C}.
  std::vector<std::string> perm = {"A", "B", "C"};
  int valid = 0;
  do {
    if (perm[2] == "C") ++valid;
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(valid == 2);

  auto [code, msg] = error_of([] { compile(chain_doc({{"A", {"B"}}, {"B", {"A"}}})); });
  CHECK(code == Errc::kCycleDetected);
  CHECK(msg.find("A, B") != std::string::npos);

  auto [self_code, self_msg] = error_of([] { compile(chain_doc({{"X", {}}, {"Y", {"Y"}}})); });
  CHECK(self_code == Errc::kCycleDetected);
  CHECK(self_msg.find("Y") != std::string::npos);
  CHECK(self_msg.find("X") == std::string::npos);

  // Downstream of a cycle but not on it.
  auto [tail_code, tail_msg] =
      error_of([] { compile(chain_doc({{"D", {"B"}}, {"A", {"B"}}, {"B", {"A"}}})); });
  CHECK(tail_code == Errc::kCycleDetected);
  CHECK(tail_msg.find("A, B") != std::string::npos);
  CHECK(tail_msg.find("D") == std::string::npos);
}

TEST_CASE("data bindings imply ordering") {
  Document d = chain_doc({{"late", {}}, {"early", {}}});
  d.steps[1].outputs = {"x"};
  d.steps[0].inputs = {"x"};
  CHECK(compile(d).stages == std::vector<std::vector<std::string>>{{"early"}, {"late"}});
}

TEST_CASE("property: compile soundness on random DAGs") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 50);
    std::vector<std::pair<std::string, std::vector<std::string>>> shape;
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i));
    std::shuffle(ids.begin(), ids.end(), rng);  // document order differs from topological order
    for (int i = 0; i < n; ++i) {
      std::vector<std::string> deps;
      for (int j = 0; j < i; ++j) {
        if (rng() % 6 == 0) deps.push_back(ids[j]);
      }
      shape.emplace_back(ids[i], deps);
    }
    std::shuffle(shape.begin(), shape.end(), rng);
    const Document d = chain_doc(shape);
    const auto plan = compile(d);
    std::map<std::string, int> stage;
    std::size_t count = 0;
    for (std::size_t k = 0; k < plan.stages.size(); ++k) {
      for (const auto& id : plan.stages[k]) {
        CHECK(stage.emplace(id, static_cast<int>(k)).second);
        ++count;
      }
    }
    CHECK(count == static_cast<std::size_t>(n));
    for (const auto& s : d.steps) {
      for (const auto& dep : s.depends_on) CHECK(stage.at(dep) < stage.at(s.id));
    }
    if (n <= 12) CHECK(stage == longest_chain_levels(d));
    CHECK(parse(serialize(d)) == d);
  }
}

TEST_CASE("property: parse-serialize-parse fixpoint") {
  const Document canonical_doc = parse(canonical());
  CHECK(parse(serialize(canonical_doc)) == canonical_doc);
  Document odd = canonical_doc;
  odd.name = "quotes \" & <angles> 'apos'\ttab\nnewline";
  odd.render->title = "R&D <report>";
  odd.steps[1].timeout_seconds = 45;
  odd.inputs.push_back({"extra", InputKind::kObject, false, {}});
  const Document back = parse(serialize(odd));
  CHECK(back == odd);
  CHECK(back.steps[1].timeout_seconds == 45);
}

TEST_CASE("fuzz: random XML yields only parse or schema errors") {
  std::mt19937_64 rng(77);
  const std::string base = canonical();
  int accepted = 0, parse_errors = 0, schema_errors = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::string doc = testing::random_ml2(rng, base, i);
    try {
      const Document d = parse(doc);
      ++accepted;
      CHECK(parse(serialize(d)) == d);
    } catch (const Error& e) {
      if (e.code() == Errc::kParseError) {
        ++parse_errors;
      } else if (e.code() == Errc::kSchemaError) {
        ++schema_errors;
      } else {
        FAIL("unexpected error code for input: " << doc);
      }
    }
  }
  CHECK(accepted + parse_errors + schema_errors == 10000);
  MESSAGE("accepted " << accepted << ", parse errors " << parse_errors << ", schema errors "
                      << schema_errors);
}
