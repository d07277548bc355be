/*
 * adapter.hpp
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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlpod/anchor/engine.hpp"

namespace mlpod::model {

using anchor::Vector;

struct Slice {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint16_t> pixels;  // row-major, height * width
};

// Slices in acquisition order.
struct ScanInput {
  std::vector<Slice> slices;

  // Errors: Errc::kInvalidArgument for an empty scan, empty or
  // inconsistently sized slices.
  void validate() const;
};

struct ModelParams {
  std::size_t latent_dim = 64;   // L
  std::size_t feature_dim = 16;  // F
  std::uint64_t seed = 0;
};

struct InferenceResult {
  double probability = 0.0;
  Vector latent;
  std::vector<Vector> slice_features;
  std::string model_name;
  int model_version = 0;

  std::string to_json() const;
  static InferenceResult from_json(std::string_view text);
};

// Raw per-slice statistics, in pixel units unless noted:
//   0 mean, 1 standard deviation, 2 min, 3 max,
//   4..7 quadrant means (top-left, top-right, bottom-left, bottom-right),
//   8 entropy of the row-sum distribution in [0,1],
//   9 mean squared forward difference (horizontal + vertical).
inline constexpr std::size_t kSliceStatCount = 10;
using SliceStats = std::array<double, kSliceStatCount>;
SliceStats slice_statistics(const Slice& slice);

// Deterministic stand-in for a CNN+RNN classifier. Statistics are scaled to
// unit range and projected to F dimensions by a seeded matrix; slices are
// then folded with h_i = tanh(A h_{i-1} + B f_i), h_0 = 0, and the
// probability is logistic(w . h_t + b). All weights derive from the seed.
class StubModel {
 public:
  explicit StubModel(ModelParams params);

  Vector slice_feature(const Slice& slice) const;

  struct Aggregate {
    Vector latent;
    double probability = 0.0;
  };
  Aggregate aggregate(const std::vector<Vector>& slice_features) const;

  InferenceResult infer(const ScanInput& scan) const;

  const ModelParams& params() const { return params_; }

 private:
  ModelParams params_;
  std::vector<double> projection_;  // F x kSliceStatCount
  std::vector<double> recurrent_;   // L x L
  std::vector<double> input_;       // L x F
  std::vector<double> readout_;     // L
  double bias_ = 0.0;
};

// Model manifest as registered with modelpod and carried in edge packages:
//   {name, version, kind, L, F, seed, threshold[, profile]}
struct ModelManifest {
  std::string name;
  int version = 0;
  std::string kind = "stub";  // stub | external | anonymizer
  std::size_t latent_dim = 64;
  std::size_t feature_dim = 16;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  std::optional<std::string> profile;  // anonymizer profile JSON

  // Errors: Errc::kParseError, Errc::kValidationError with the field name.
  static ModelManifest from_json(std::string_view text);
  // Compact JSON with keys in sorted order; identical manifests yield
  // identical bytes.
  std::string to_json() const;
  ModelParams params() const { return {latent_dim, feature_dim, seed}; }

  bool operator==(const ModelManifest&) const = default;
};

}  // namespace mlpod::model
