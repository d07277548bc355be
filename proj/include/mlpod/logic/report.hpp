/*
 * report.hpp
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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mlpod/anchor/engine.hpp"
#include "mlpod/model/adapter.hpp"

namespace mlpod::logic {

struct SimilarSlice {
  std::size_t anchor_slice_index = 0;
  std::size_t patient_slice_index = 0;
  double similarity = 0.0;
  std::string anchor_image_ref;  // empty when the anchor has no image for that slice
};

struct TraceEntry {
  std::string step;
  std::string env;
  std::int64_t duration_ms = 0;
  std::string model;
  int model_version = 0;
};

inline constexpr const char* kExplanationsUnavailable = "explanations unavailable";

struct DiagnosisReport {
  std::string run_id;
  std::string title;
  std::string patient_pseudo_id;
  double probability = 0.0;
  double threshold = 0.5;
  std::string label;  // positive | negative
  std::string anchor_id;
  std::string anchor_label;
  double anchor_distance = 0.0;
  double anchor_confidence = 0.0;
  std::vector<SimilarSlice> similar_slices;
  std::string explanation_text;
  std::vector<TraceEntry> pipeline_trace;
  std::optional<std::string> warning;  // set on degraded reports

  bool degraded() const { return warning.has_value(); }
  nlohmann::json to_json() const;
  static DiagnosisReport from_json(const nlohmann::json& j);
};

struct ReportInputs {
  std::string run_id;
  std::string title;
  model::InferenceResult result;
  std::string patient_pseudo_id;
  double threshold = 0.5;
  std::optional<anchor::AnchorSet> anchors;  // nullopt renders a degraded report
  std::vector<TraceEntry> trace;
  std::size_t k = anchor::kDefaultTopK;
};

// "positive" iff probability >= threshold.
std::string label_for(double probability, double threshold);

// "Assigned to anchor {id} ({label}) at distance {d:.3}; confidence {c:.2}."
std::string explanation_text(const std::string& anchor_id, anchor::Label label, double distance,
                             double confidence);

// Classifies the latent against the anchor set. An anchor set whose
// dimension differs from the latent also yields a degraded report.
DiagnosisReport render_report(const ReportInputs& in);

}  // namespace mlpod::logic
