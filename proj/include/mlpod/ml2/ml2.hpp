/*
 * ml2.hpp
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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mlpod::ml2 {

// 1-based source position. Positions are diagnostics only, so they compare
// equal regardless of value and never affect document equality.
struct Location {
  int line = 0;
  int column = 0;

  bool operator==(const Location&) const { return true; }
  std::string str() const;
};

enum class InputKind { kDicomSeries, kObject };
enum class Env { kCloud, kEdge };
enum class SectionKind { kProbability, kLabel, kConfidence, kAnchorImages, kSimilarSlices, kText };

std::string_view input_kind_name(InputKind k);
std::string_view env_name(Env e);
std::string_view section_kind_name(SectionKind k);

struct Input {
  std::string id;
  InputKind kind = InputKind::kObject;
  bool required = false;
  Location where;
  bool operator==(const Input&) const = default;
};

struct Model {
  std::string id;
  std::string service;
  std::string name;
  std::string version = "latest";  // "latest" or a positive integer
  Location where;
  bool operator==(const Model&) const = default;
};

struct Step {
  std::string id;
  std::string model;
  Env env = Env::kCloud;
  std::vector<std::string> inputs;   // <in bind="..."/>
  std::vector<std::string> outputs;  // <out id="..."/>
  std::vector<std::string> depends_on;
  std::optional<int> timeout_seconds;
  Location where;
  bool operator==(const Step&) const = default;
};

struct Section {
  SectionKind kind = SectionKind::kText;
  std::string source;
  Location where;
  bool operator==(const Section&) const = default;
};

struct Render {
  std::string title;
  std::vector<Section> sections;
  Location where;
  bool operator==(const Render&) const = default;
};

struct Document {
  std::string name;
  std::vector<Input> inputs;
  std::vector<Model> models;
  std::vector<Step> steps;
  std::optional<Render> render;
  bool operator==(const Document&) const = default;

  const Model* find_model(std::string_view id) const;
  const Step* find_step(std::string_view id) const;
};

// Errors: Errc::kParseError for malformed XML, Errc::kSchemaError for
// anything outside the closed schema. Messages start with "line:column".
Document parse(std::string_view xml);
std::string serialize(const Document& doc);

struct Diagnostic {
  Location where;
  std::string message;

  std::string str() const;  // "line:column: message"
};

// Reference and registry checks; an empty result means the document can be
// compiled and run against `registry` (service name -> base URL).
std::vector<Diagnostic> validate(const Document& doc,
                                 const std::map<std::string, std::string>& registry);

struct ExecutionPlan {
  std::vector<std::vector<std::string>> stages;  // step ids, document order per stage
  std::map<std::string, std::string> producers;  // output id -> producing step id
  std::map<std::string, std::vector<std::string>> dependencies;  // step -> steps it waits on
  Document doc;
};

// Kahn layering. A step depends on every step named in depends-on and on
// every step producing one of its inputs. Errors: Errc::kCycleDetected naming
// the steps on a cycle; Errc::kValidationError on duplicate or dangling ids.
ExecutionPlan compile(const Document& doc);

}  // namespace mlpod::ml2
