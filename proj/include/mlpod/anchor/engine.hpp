/*
 * engine.hpp
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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlpod::anchor {

using Vector = std::vector<double>;

enum class Label { kCovid, kNonCovid };

std::string_view label_name(Label label);
std::optional<Label> parse_label(std::string_view text);

struct Anchor {
  std::string id;
  Vector centroid;
  double radius = 0.0;
  Label label = Label::kCovid;
  std::vector<Vector> slice_features;
  std::vector<std::string> representative_images;

  bool operator==(const Anchor&) const = default;
};

struct AnchorSet {
  std::string name;
  std::size_t dim = 0;  // L
  std::string metric = "euclidean";
  std::vector<Anchor> anchors;

  std::size_t size() const { return anchors.size(); }  // M
  std::vector<double> radii() const;

  // Throws Errc::kValidationError; the message starts with the offending
  // field path, e.g. "anchors[2].radius: must be >= 0".
  void validate() const;

  bool operator==(const AnchorSet&) const = default;
};

// One training case: the scan-level latent, its label, and the per-slice
// features kept for explanation.
struct LatentRecord {
  Vector latent;
  Label label = Label::kCovid;
  std::vector<Vector> slice_features;
  std::vector<std::string> representative_images;
};

struct ClusteringOptions {
  int max_iterations = 100;
  double tolerance = 1e-6;  // stop once no centroid moves further than this
  int restarts = 20;        // independent k-means++ seedings; lowest WCSS wins
};

struct Clustering {
  std::vector<Vector> centroids;
  std::vector<std::size_t> assignment;  // point index -> cluster index
  double wcss = 0.0;                    // within-cluster sum of squares
  int iterations = 0;
};

// Seeded k-means++ initialisation followed by Lloyd iterations.
Clustering kmeans(std::span<const Vector> points, std::size_t k, std::uint64_t seed,
                  const ClusteringOptions& options = {});

double within_cluster_ss(std::span<const Vector> points, std::span<const std::size_t> assignment,
                         std::span<const Vector> centroids);

AnchorSet generate_anchors(std::span<const LatentRecord> latents, std::size_t m,
                           std::uint64_t seed, std::string name = "anchors",
                           const ClusteringOptions& options = {});

double euclidean_distance(std::span<const double> a, std::span<const double> b);

struct NearestAnchor {
  std::size_t index = 0;
  std::string anchor_id;
  double distance = 0.0;
};

// Linear scan; ties resolve to the lowest anchor index.
NearestAnchor nearest_anchor(std::span<const double> v, const AnchorSet& set);

// 1 at the centroid, 0.5 at the cluster radius, 0 from twice the radius on.
// A zero radius falls back to the median of the set's positive radii.
double confidence(double distance, double radius, std::span<const double> all_radii);

struct SliceMatch {
  std::size_t anchor_slice_index = 0;
  std::size_t patient_slice_index = 0;
  double similarity = 0.0;

  bool operator==(const SliceMatch&) const = default;
};

inline constexpr std::size_t kDefaultTopK = 3;

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Top-K (anchor slice, patient slice) pairs by cosine similarity.
std::vector<SliceMatch> slice_similarity(std::span<const Vector> patient_slices,
                                         const Anchor& anchor, std::size_t k = kDefaultTopK);

struct AnchorDecision {
  std::string anchor_id;
  std::size_t anchor_index = 0;
  double distance = 0.0;
  double confidence = 0.0;
  Label label = Label::kCovid;
};

struct Classification {
  AnchorDecision decision;
  std::vector<SliceMatch> matches;
};

Classification classify(std::span<const double> v, std::span<const Vector> patient_slices,
                        const AnchorSet& set, std::size_t k = kDefaultTopK);

}  // namespace mlpod::anchor
