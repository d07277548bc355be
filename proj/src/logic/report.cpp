/*
 * report.cpp
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

#include "mlpod/logic/report.hpp"

#include <cstdio>

#include "mlpod/common/error.hpp"

namespace mlpod::logic {

using Json = nlohmann::json;

Json DiagnosisReport::to_json() const {
  Json slices = Json::array();
  for (const auto& s : similar_slices) {
    slices.push_back({{"anchor_slice_index", s.anchor_slice_index},
                      {"patient_slice_index", s.patient_slice_index},
                      {"similarity", s.similarity},
                      {"anchor_image_ref", s.anchor_image_ref}});
  }
  Json trace = Json::array();
  for (const auto& t : pipeline_trace) {
    trace.push_back({{"step", t.step},
                     {"env", t.env},
                     {"duration_ms", t.duration_ms},
                     {"model", t.model},
                     {"model_version", t.model_version}});
  }
  Json j = {{"run_id", run_id},
            {"title", title},
            {"patient_pseudo_id", patient_pseudo_id},
            {"probability", probability},
            {"threshold", threshold},
            {"label", label},
            {"similar_slices", slices},
            {"explanation_text", explanation_text},
            {"pipeline_trace", trace}};
  if (warning) {
    j["warning"] = *warning;
  } else {
    j["anchor_id"] = anchor_id;
    j["anchor_label"] = anchor_label;
    j["anchor_distance"] = anchor_distance;
    j["anchor_confidence"] = anchor_confidence;
  }
  return j;
}

DiagnosisReport DiagnosisReport::from_json(const Json& j) {
  DiagnosisReport r;
  r.run_id = j.at("run_id").get<std::string>();
  r.title = j.value("title", "");
  r.patient_pseudo_id = j.value("patient_pseudo_id", "");
  r.probability = j.at("probability").get<double>();
  r.threshold = j.value("threshold", 0.5);
  r.label = j.at("label").get<std::string>();
  r.anchor_id = j.value("anchor_id", "");
  r.anchor_label = j.value("anchor_label", "");
  r.anchor_distance = j.value("anchor_distance", 0.0);
  r.anchor_confidence = j.value("anchor_confidence", 0.0);
  for (const auto& s : j.value("similar_slices", Json::array())) {
    r.similar_slices.push_back({s.at("anchor_slice_index").get<std::size_t>(),
                                s.at("patient_slice_index").get<std::size_t>(),
                                s.at("similarity").get<double>(), s.value("anchor_image_ref", "")});
  }
  r.explanation_text = j.value("explanation_text", "");
  for (const auto& t : j.value("pipeline_trace", Json::array())) {
    r.pipeline_trace.push_back({t.at("step").get<std::string>(), t.value("env", ""),
                                t.value("duration_ms", std::int64_t{0}), t.value("model", ""),
                                t.value("model_version", 0)});
  }
  if (j.contains("warning")) r.warning = j["warning"].get<std::string>();
  return r;
}

std::string label_for(double probability, double threshold) {
  return probability >= threshold ? "positive" : "negative";
}

std::string explanation_text(const std::string& anchor_id, anchor::Label label, double distance,
                             double confidence) {
  char numbers[96];
  std::snprintf(numbers, sizeof numbers, "at distance %.3f; confidence %.2f.", distance, confidence);
  return "Assigned to anchor " + anchor_id + " (" + std::string(anchor::label_name(label)) + ") " +
         numbers;
}

DiagnosisReport render_report(const ReportInputs& in) {
  DiagnosisReport r;
  r.run_id = in.run_id;
  r.title = in.title;
  r.patient_pseudo_id = in.patient_pseudo_id;
  r.probability = in.result.probability;
  r.threshold = in.threshold;
  r.label = label_for(in.result.probability, in.threshold);
  r.pipeline_trace = in.trace;
  if (!in.anchors || in.anchors->anchors.empty() || in.anchors->dim != in.result.latent.size()) {
    r.warning = kExplanationsUnavailable;
    return r;
  }
  anchor::Classification c;
  try {
    c = anchor::classify(in.result.latent, in.result.slice_features, *in.anchors, in.k);
  } catch (const Error&) {
    r.warning = kExplanationsUnavailable;
    return r;
  }
  const anchor::Anchor& a = in.anchors->anchors[c.decision.anchor_index];
  r.anchor_id = c.decision.anchor_id;
  r.anchor_label = std::string(anchor::label_name(c.decision.label));
  r.anchor_distance = c.decision.distance;
  r.anchor_confidence = c.decision.confidence;
  for (const auto& m : c.matches) {
    SimilarSlice s{m.anchor_slice_index, m.patient_slice_index, m.similarity, {}};
    if (m.anchor_slice_index < a.representative_images.size()) {
      s.anchor_image_ref = a.representative_images[m.anchor_slice_index];
    }
    r.similar_slices.push_back(std::move(s));
  }
  r.explanation_text =
      explanation_text(r.anchor_id, c.decision.label, c.decision.distance, c.decision.confidence);
  return r;
}

}  // namespace mlpod::logic
