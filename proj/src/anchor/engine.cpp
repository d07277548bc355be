/*
 * engine.cpp
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

#include "mlpod/anchor/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "mlpod/common/error.hpp"

namespace mlpod::anchor {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::size_t nearest_index(std::span<const double> p, std::span<const Vector> centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<Vector> seed_plus_plus(std::span<const Vector> points, std::size_t k,
                                   std::mt19937_64& rng) {
  const std::size_t n = points.size();
  std::vector<Vector> centers;
  std::vector<bool> chosen(n, false);
  std::size_t first = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(n));
  first = std::min(first, n - 1);
  centers.push_back(points[first]);
  chosen[first] = true;

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], centers[0]);

  while (centers.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = unit_uniform(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && acc > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) {  // rounding left the target past the last bucket
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // Every remaining point coincides with a center; pick an unused index.
      std::vector<std::size_t> unused;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) unused.push_back(i);
      }
      pick = unused[std::min(unused.size() - 1,
                             static_cast<std::size_t>(unit_uniform(rng) *
                                                      static_cast<double>(unused.size())))];
    }
    centers.push_back(points[pick]);
    chosen[pick] = true;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
    }
  }
  return centers;
}

// Recomputes means; an emptied cluster takes the point farthest from its own
// centroid among clusters with more than one member.
std::vector<Vector> update_centroids(std::span<const Vector> points,
                                     std::vector<std::size_t>& assignment,
                                     std::span<const Vector> old_centroids) {
  const std::size_t k = old_centroids.size();
  const std::size_t dim = points[0].size();
  std::vector<Vector> sums(k, Vector(dim, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    ++counts[assignment[i]];
    for (std::size_t j = 0; j < dim; ++j) sums[assignment[i]][j] += points[i][j];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] > 0) continue;
    std::size_t far = points.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (counts[assignment[i]] < 2) continue;
      const double d = squared_distance(points[i], old_centroids[assignment[i]]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far == points.size()) continue;
    const std::size_t from = assignment[far];
    --counts[from];
    for (std::size_t j = 0; j < dim; ++j) sums[from][j] -= points[far][j];
    assignment[far] = c;
    counts[c] = 1;
    sums[c] = points[far];
  }
  std::vector<Vector> centroids(k);
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) {
      centroids[c] = old_centroids[c];
      continue;
    }
    centroids[c] = std::move(sums[c]);
    for (double& x : centroids[c]) x /= static_cast<double>(counts[c]);
  }
  return centroids;
}

bool assign_all(std::span<const Vector> points, std::span<const Vector> centroids,
                std::vector<std::size_t>& assignment) {
  bool changed = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t c = nearest_index(points[i], centroids);
    if (c != assignment[i]) {
      assignment[i] = c;
      changed = true;
    }
  }
  return changed;
}

// Single-point transfers that lower the objective once the move's effect on
// both means is accounted for. A partition stable under these moves is also
// stable under Lloyd reassignment, so this only ever tightens the result.
void hartigan_refine(std::span<const Vector> points, std::vector<std::size_t>& assignment,
                     std::vector<Vector>& centroids, int max_passes) {
  const std::size_t k = centroids.size();
  const std::size_t dim = points[0].size();
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t a : assignment) ++counts[a];
  for (int pass = 0; pass < max_passes; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::size_t from = assignment[i];
      if (counts[from] < 2) continue;
      const double na = static_cast<double>(counts[from]);
      const double removal = na / (na - 1.0) * squared_distance(points[i], centroids[from]);
      std::size_t best = from;
      double best_gain = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        if (c == from) continue;
        const double nb = static_cast<double>(counts[c]);
        const double gain = removal - nb / (nb + 1.0) * squared_distance(points[i], centroids[c]);
        if (gain > best_gain) {
          best_gain = gain;
          best = c;
        }
      }
      // Relative threshold keeps rounding noise from cycling points.
      if (best == from || best_gain <= 1e-12 * (removal + 1e-300)) continue;
      const double nb = static_cast<double>(counts[best]);
      for (std::size_t j = 0; j < dim; ++j) {
        centroids[from][j] = (centroids[from][j] * na - points[i][j]) / (na - 1.0);
        centroids[best][j] = (centroids[best][j] * nb + points[i][j]) / (nb + 1.0);
      }
      --counts[from];
      ++counts[best];
      assignment[i] = best;
      moved = true;
    }
    if (!moved) break;
  }
}

Clustering lloyd(std::span<const Vector> points, std::vector<Vector> centroids,
                 const ClusteringOptions& options) {
  Clustering out;
  out.assignment.assign(points.size(), centroids.size());
  assign_all(points, centroids, out.assignment);
  int it = 0;
  while (it < options.max_iterations) {
    ++it;
    auto next = update_centroids(points, out.assignment, centroids);
    double shift = 0.0;
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      shift = std::max(shift, euclidean_distance(next[c], centroids[c]));
    }
    centroids = std::move(next);
    const bool changed = assign_all(points, centroids, out.assignment);
    if (shift < options.tolerance || !changed) break;
  }
  centroids = update_centroids(points, out.assignment, centroids);
  hartigan_refine(points, out.assignment, centroids, options.max_iterations);
  // Centroids are reported as exact means of the final assignment.
  out.centroids = update_centroids(points, out.assignment, centroids);
  out.wcss = within_cluster_ss(points, out.assignment, out.centroids);
  out.iterations = it;
  return out;
}

std::string anchor_id_for(std::size_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return "anchor-" + digits;
}

}  // namespace

std::string_view label_name(Label label) {
  return label == Label::kCovid ? "covid" : "non-covid";
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "covid") return Label::kCovid;
  if (text == "non-covid") return Label::kNonCovid;
  return std::nullopt;
}

std::vector<double> AnchorSet::radii() const {
  std::vector<double> out;
  out.reserve(anchors.size());
  for (const auto& a : anchors) out.push_back(a.radius);
  return out;
}

void AnchorSet::validate() const {
  auto invalid = [](const std::string& path, const std::string& why) {
    fail(Errc::kValidationError, path + ": " + why);
  };
  if (name.empty()) invalid("name", "must be non-empty");
  if (metric != "euclidean") invalid("metric", "only \"euclidean\" is supported");
  if (dim == 0) invalid("L", "must be >= 1");
  if (anchors.empty()) invalid("anchors", "at least one anchor is required");
  std::set<std::string> ids;
  std::optional<std::size_t> feature_dim;
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    const Anchor& a = anchors[k];
    const std::string at = "anchors[" + std::to_string(k) + "]";
    if (a.id.empty()) invalid(at + ".id", "must be non-empty");
    if (!ids.insert(a.id).second) invalid(at + ".id", "duplicate anchor id " + a.id);
    if (a.centroid.size() != dim) {
      invalid(at + ".centroid", "expected " + std::to_string(dim) + " values, got " +
                                    std::to_string(a.centroid.size()));
    }
    if (!all_finite(a.centroid)) invalid(at + ".centroid", "values must be finite");
    if (!std::isfinite(a.radius)) invalid(at + ".radius", "must be finite");
    if (a.radius < 0.0) invalid(at + ".radius", "must be >= 0");
    for (std::size_t s = 0; s < a.slice_features.size(); ++s) {
      const std::string sp = at + ".slice_features[" + std::to_string(s) + "]";
      if (!feature_dim) feature_dim = a.slice_features[s].size();
      if (a.slice_features[s].size() != *feature_dim || a.slice_features[s].empty()) {
        invalid(sp, "inconsistent feature dimension");
      }
      if (!all_finite(a.slice_features[s])) invalid(sp, "values must be finite");
    }
  }
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

double within_cluster_ss(std::span<const Vector> points, std::span<const std::size_t> assignment,
                         std::span<const Vector> centroids) {
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sum += squared_distance(points[i], centroids[assignment[i]]);
  }
  return sum;
}

Clustering kmeans(std::span<const Vector> points, std::size_t k, std::uint64_t seed,
                  const ClusteringOptions& options) {
  if (k == 0) fail(Errc::kInvalidArgument, "number of clusters must be positive");
  if (points.size() < k) {
    fail(Errc::kInvalidArgument, "cannot form " + std::to_string(k) + " clusters from " +
                                     std::to_string(points.size()) + " points");
  }
  const std::size_t dim = points[0].size();
  if (dim == 0) fail(Errc::kInvalidArgument, "points must have at least one dimension");
  for (const auto& p : points) {
    if (p.size() != dim) fail(Errc::kInvalidArgument, "points differ in dimension");
    if (!all_finite(p)) fail(Errc::kInvalidArgument, "non-finite latent value");
  }

  std::mt19937_64 rng(seed);
  std::optional<Clustering> best;
  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    Clustering run = lloyd(points, seed_plus_plus(points, k, rng), options);
    if (!best || run.wcss < best->wcss) best = std::move(run);
  }
  return std::move(*best);
}

AnchorSet generate_anchors(std::span<const LatentRecord> latents, std::size_t m,
                           std::uint64_t seed, std::string name,
                           const ClusteringOptions& options) {
  std::vector<Vector> points;
  points.reserve(latents.size());
  for (const auto& rec : latents) points.push_back(rec.latent);
  Clustering clustering = kmeans(points, m, seed, options);

  AnchorSet set;
  set.name = std::move(name);
  set.dim = points.empty() ? 0 : points[0].size();
  for (std::size_t c = 0; c < m; ++c) {
    Anchor anchor;
    anchor.id = anchor_id_for(c);
    anchor.centroid = clustering.centroids[c];
    std::size_t covid = 0;
    std::size_t members = 0;
    std::size_t closest = latents.size();
    double closest_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < latents.size(); ++i) {
      if (clustering.assignment[i] != c) continue;
      ++members;
      if (latents[i].label == Label::kCovid) ++covid;
      const double d = euclidean_distance(points[i], anchor.centroid);
      anchor.radius = std::max(anchor.radius, d);
      if (d < closest_d) {
        closest_d = d;
        closest = i;
      }
    }
    // Ties go to covid.
    anchor.label = 2 * covid >= members ? Label::kCovid : Label::kNonCovid;
    if (closest < latents.size()) {
      anchor.slice_features = latents[closest].slice_features;
      anchor.representative_images = latents[closest].representative_images;
    }
    set.anchors.push_back(std::move(anchor));
  }
  return set;
}

NearestAnchor nearest_anchor(std::span<const double> v, const AnchorSet& set) {
  if (set.anchors.empty()) fail(Errc::kInvalidArgument, "anchor set is empty");
  if (v.size() != set.dim) {
    fail(Errc::kInvalidArgument, "latent has dimension " + std::to_string(v.size()) +
                                     ", anchor set expects " + std::to_string(set.dim));
  }
  NearestAnchor best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.anchors.size(); ++i) {
    const double d = euclidean_distance(v, set.anchors[i].centroid);
    if (d < best.distance) {
      best.distance = d;
      best.index = i;
    }
  }
  best.anchor_id = set.anchors[best.index].id;
  return best;
}

double confidence(double distance, double radius, std::span<const double> all_radii) {
  double r = radius;
  if (!(r > 0.0)) {
    std::vector<double> positive;
    for (double x : all_radii) {
      if (x > 0.0) positive.push_back(x);
    }
    if (positive.empty()) return distance == 0.0 ? 1.0 : 0.0;
    std::sort(positive.begin(), positive.end());
    const std::size_t n = positive.size();
    r = n % 2 == 1 ? positive[n / 2] : 0.5 * (positive[n / 2 - 1] + positive[n / 2]);
  }
  return std::clamp(1.0 - distance / (2.0 * r), 0.0, 1.0);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::vector<SliceMatch> slice_similarity(std::span<const Vector> patient_slices,
                                         const Anchor& anchor, std::size_t k) {
  if (patient_slices.empty() || anchor.slice_features.empty()) {
    fail(Errc::kInvalidArgument, "slice similarity needs slices on both sides");
  }
  if (k == 0) fail(Errc::kInvalidArgument, "K must be positive");
  const std::size_t f = anchor.slice_features[0].size();
  for (const auto& p : patient_slices) {
    if (p.size() != f) fail(Errc::kInvalidArgument, "slice feature dimensions differ");
  }
  std::vector<SliceMatch> pairs;
  pairs.reserve(anchor.slice_features.size() * patient_slices.size());
  for (std::size_t a = 0; a < anchor.slice_features.size(); ++a) {
    if (anchor.slice_features[a].size() != f) {
      fail(Errc::kInvalidArgument, "slice feature dimensions differ");
    }
    for (std::size_t p = 0; p < patient_slices.size(); ++p) {
      pairs.push_back({a, p, cosine_similarity(anchor.slice_features[a], patient_slices[p])});
    }
  }
  // Pairs are generated in (anchor, patient) order, so a stable sort on
  // similarity alone keeps the documented tie order.
  std::stable_sort(pairs.begin(), pairs.end(), [](const SliceMatch& x, const SliceMatch& y) {
    return x.similarity > y.similarity;
  });
  if (pairs.size() > k) pairs.resize(k);
  return pairs;
}

Classification classify(std::span<const double> v, std::span<const Vector> patient_slices,
                        const AnchorSet& set, std::size_t k) {
  const NearestAnchor nearest = nearest_anchor(v, set);
  const Anchor& anchor = set.anchors[nearest.index];
  const auto radii = set.radii();

  Classification out;
  out.decision.anchor_id = anchor.id;
  out.decision.anchor_index = nearest.index;
  out.decision.distance = nearest.distance;
  out.decision.confidence = confidence(nearest.distance, anchor.radius, radii);
  out.decision.label = anchor.label;
  if (!anchor.slice_features.empty() && !patient_slices.empty()) {
    out.matches = slice_similarity(patient_slices, anchor, k);
  }
  return out;
}

}  // namespace mlpod::anchor
