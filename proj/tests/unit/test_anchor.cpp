/*
 * test_anchor.cpp
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
#include <map>
#include <numeric>
#include <random>

#include "doctest.h"
#include "mlpod/anchor/engine.hpp"
#include "mlpod/common/error.hpp"
#include "oracles.hpp"

using namespace mlpod;
using namespace mlpod::anchor;
using mlpod::testing::Point;

namespace {

std::vector<LatentRecord> records_from(const std::vector<Point>& pts, Label label = Label::kCovid) {
  std::vector<LatentRecord> out;
  for (const auto& p : pts) out.push_back({p, label, {}, {}});
  return out;
}

AnchorSet two_anchor_set() {
  AnchorSet set;
  set.name = "t";
  set.dim = 2;
  set.anchors.push_back({"a", {0, 0}, 1.0, Label::kCovid, {}, {}});
  set.anchors.push_back({"b", {10, 0}, 2.0, Label::kNonCovid, {}, {}});
  return set;
}

std::vector<Point> random_points(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::vector<Point> pts(n, Point(dim));
  for (auto& p : pts) {
    for (auto& x : p) x = testing::gaussian(rng) * 3.0;
  }
  return pts;
}

}  // namespace

TEST_CASE("generate_anchors on the 1-D example matches the best 2-partition") {
  const std::vector<Point> pts = {{0.0}, {0.1}, {9.9}, {10.0}};
  const auto oracle = testing::exhaustive_partition_optimum(pts, 2);
  // Oracle: {0, 0.1} | {9.9, 10.0}, WCSS = 4 * 0.05^2.
  CHECK(oracle.wcss == doctest::Approx(0.01));
  CHECK(oracle.labels[0] == oracle.labels[1]);
  CHECK(oracle.labels[2] == oracle.labels[3]);

  AnchorSet set = generate_anchors(records_from(pts), 2, 1);
  std::vector<double> centroids = {set.anchors[0].centroid[0], set.anchors[1].centroid[0]};
  std::sort(centroids.begin(), centroids.end());
  CHECK(centroids[0] == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(centroids[1] == doctest::Approx(9.95).epsilon(1e-12));
  CHECK(set.anchors[0].radius == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(set.anchors[1].radius == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(set.anchors[0].id == "anchor-000");
}

TEST_CASE("M equal to the point count gives singleton anchors with zero radius") {
  std::mt19937_64 rng(3);
  auto pts = random_points(rng, 6, 3);
  pts.push_back(pts[2]);  // a duplicate must still get its own anchor
  AnchorSet set = generate_anchors(records_from(pts), pts.size(), 11);
  CHECK(set.size() == pts.size());
  for (const auto& a : set.anchors) CHECK(a.radius == 0.0);
}

TEST_CASE("generate_anchors is deterministic under a seed") {
  std::mt19937_64 rng(5);
  auto pts = random_points(rng, 40, 4);
  CHECK(generate_anchors(records_from(pts), 5, 77) == generate_anchors(records_from(pts), 5, 77));
}

TEST_CASE("generate_anchors rejects bad input") {
  const std::vector<Point> pts = {{0.0}, {1.0}};
  CHECK_THROWS_AS(generate_anchors(records_from(pts), 3, 1), Error);
  CHECK_THROWS_AS(generate_anchors(records_from({{0.0}, {NAN}}), 1, 1), Error);
  CHECK_THROWS_AS(generate_anchors(records_from({{0.0}, {1.0, 2.0}}), 1, 1), Error);
}

TEST_CASE("labels follow the member majority, ties go to covid") {
  std::vector<LatentRecord> recs = {
      {{0.0}, Label::kNonCovid, {{1, 0}}, {"img-a"}},
      {{0.2}, Label::kCovid, {{0, 1}}, {"img-b"}},
      {{10.0}, Label::kNonCovid, {{1, 1}}, {"img-c"}},
      {{10.2}, Label::kNonCovid, {{2, 1}}, {"img-d"}},
      {{10.1}, Label::kCovid, {{3, 1}}, {"img-e"}},
  };
  AnchorSet set = generate_anchors(recs, 2, 4);
  const Anchor& low = set.anchors[0].centroid[0] < 5 ? set.anchors[0] : set.anchors[1];
  const Anchor& high = set.anchors[0].centroid[0] < 5 ? set.anchors[1] : set.anchors[0];
  CHECK(low.label == Label::kCovid);
  CHECK(high.label == Label::kNonCovid);
  // The member nearest the centroid (10.1) supplies the explanation slices.
  CHECK(high.representative_images == std::vector<std::string>{"img-e"});
  CHECK(high.slice_features == std::vector<Vector>{{3, 1}});
}

TEST_CASE("clustering matches the exhaustive optimum on small instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + rng() % 5;  // 4..8
    const int k = 1 + static_cast<int>(rng() % 3);
    auto pts = random_points(rng, n, 1 + rng() % 3);
    const auto oracle = testing::exhaustive_partition_optimum(pts, k);
    const auto got = kmeans(pts, static_cast<std::size_t>(k), rng());
    CHECK(std::abs(got.wcss - oracle.wcss) <= 1e-9);
  }
}

TEST_CASE("clustering is no worse than the best of ten random-init Lloyd runs") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 6 + rng() % 7;  // 6..12
    const int k = 2 + static_cast<int>(rng() % 3);
    auto pts = random_points(rng, n, 2);
    double best_random = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 10; ++s) {
      best_random = std::min(best_random, testing::random_init_lloyd_wcss(pts, k, rng()));
    }
    CHECK(kmeans(pts, static_cast<std::size_t>(k), rng()).wcss <= best_random + 1e-9);
  }
}

TEST_CASE("nearest_anchor examples") {
  AnchorSet set = two_anchor_set();
  auto n = nearest_anchor(std::vector<double>{1, 0}, set);
  CHECK(n.anchor_id == "a");
  CHECK(n.distance == 1.0);
  n = nearest_anchor(std::vector<double>{10, 0}, set);
  CHECK(n.anchor_id == "b");
  CHECK(n.distance == 0.0);
  n = nearest_anchor(std::vector<double>{5, 3}, set);
  CHECK(n.index == 0);
  CHECK_THROWS_AS(nearest_anchor(std::vector<double>{1, 2, 3}, set), Error);
}

TEST_CASE("property: nearest_anchor equals a brute-force scan and is permutation invariant") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + rng() % 32;
    const std::size_t dim = 1 + rng() % 6;
    AnchorSet set;
    set.name = "p";
    set.dim = dim;
    std::vector<Point> cents = random_points(rng, m, dim);
    for (std::size_t i = 0; i < m; ++i) {
      set.anchors.push_back({"a" + std::to_string(i), cents[i], 1.0, Label::kCovid, {}, {}});
    }
    const Point q = random_points(rng, 1, dim)[0];
    const auto got = nearest_anchor(q, set);
    CHECK(got.index == testing::brute_force_nearest(q, cents));

    AnchorSet shuffled = set;
    std::shuffle(shuffled.anchors.begin(), shuffled.anchors.end(), rng);
    CHECK(nearest_anchor(q, shuffled).anchor_id == got.anchor_id);
  }
}

TEST_CASE("confidence formula") {
  const std::vector<double> radii = {2.0, 4.0};
  CHECK(confidence(0.0, 2.0, radii) == 1.0);
  CHECK(confidence(2.0, 2.0, radii) == doctest::Approx(0.5));
  CHECK(confidence(4.0, 2.0, radii) == 0.0);
  CHECK(confidence(6.0, 2.0, radii) == 0.0);
  // Zero radius: median of positive radii (2, 4) -> 3.
  CHECK(confidence(3.0, 0.0, std::vector<double>{0.0, 2.0, 4.0}) == doctest::Approx(0.5));
  CHECK(confidence(3.0, 0.0, std::vector<double>{0.0, 2.0, 3.0, 9.0}) == doctest::Approx(0.5));
  // No positive radius anywhere.
  CHECK(confidence(0.0, 0.0, std::vector<double>{0.0, 0.0}) == 1.0);
  CHECK(confidence(0.1, 0.0, std::vector<double>{0.0}) == 0.0);
}

TEST_CASE("property: confidence is bounded and non-increasing in distance") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> radii(1 + rng() % 5);
    for (auto& r : radii) r = (rng() % 4 == 0) ? 0.0 : static_cast<double>(rng() % 1000) / 100.0;
    const double radius = radii[rng() % radii.size()];
    double prev = 2.0;
    for (int i = 0; i <= 100; ++i) {
      const double c = confidence(i * 0.25, radius, radii);
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
      CHECK(c <= prev);
      prev = c;
    }
  }
}

TEST_CASE("slice similarity examples") {
  Anchor anchor{"a", {0}, 0, Label::kCovid, {{1, 0}, {0, 1}}, {}};
  auto top = slice_similarity(std::vector<Vector>{{2, 0}}, anchor, 1);
  REQUIRE(top.size() == 1);
  CHECK(top[0] == SliceMatch{0, 0, 1.0});

  auto all = slice_similarity(std::vector<Vector>{{0, 0}, {3, 3}}, anchor, 10);
  CHECK(all.size() == 4);  // K beyond the pair count returns every pair
  CHECK(all[0].similarity == doctest::Approx(std::sqrt(0.5)));
  CHECK(all[0].anchor_slice_index == 0);
  CHECK(all[0].patient_slice_index == 1);
  CHECK(all[1].anchor_slice_index == 1);
  CHECK(all[2].similarity == 0.0);  // zero-norm patient slice
  CHECK(all[2].anchor_slice_index == 0);
  CHECK(all[2].patient_slice_index == 0);

  Anchor ortho{"o", {0}, 0, Label::kCovid, {{1, 0, 0}}, {}};
  for (const auto& m : slice_similarity(std::vector<Vector>{{0, 1, 0}, {0, 0, 5}}, ortho, 3)) {
    CHECK(m.similarity == 0.0);
  }
  Anchor same{"s", {0}, 0, Label::kCovid, {{0.3, 0.1}, {0.5, 0.9}}, {}};
  auto first = slice_similarity(std::vector<Vector>{{1, 2}, {0.5, 0.9}}, same, 1);
  CHECK(first[0].anchor_slice_index == 1);
  CHECK(first[0].patient_slice_index == 1);
  CHECK(first[0].similarity == doctest::Approx(1.0));
}

TEST_CASE("classify composes the pieces") {
  AnchorSet set = two_anchor_set();
  set.anchors[0].slice_features = {{1, 0}, {0, 1}};
  auto c = classify(std::vector<double>{0, 0}, std::vector<Vector>{{0, 2}}, set);
  CHECK(c.decision.anchor_id == "a");
  CHECK(c.decision.label == Label::kCovid);
  CHECK(c.decision.confidence == 1.0);
  REQUIRE(c.matches.size() == 2);
  CHECK(c.matches[0].anchor_slice_index == 1);

  AnchorSet single;
  single.name = "one";
  single.dim = 2;
  single.anchors.push_back({"only", {0, 0}, 1.0, Label::kNonCovid, {}, {}});
  CHECK(classify(std::vector<double>{50, -7}, {}, single).decision.anchor_id == "only");
}

TEST_CASE("classify agrees with brute-force nearest centroid on separated clusters") {
  std::mt19937_64 rng(404);
  const std::vector<Point> centers = {{0, 0, 0}, {8, 0, 0}, {0, 8, 0}, {0, 0, 8}};
  std::vector<LatentRecord> recs;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (int i = 0; i < 25; ++i) {
      Point p = centers[c];
      for (auto& x : p) x += 0.2 * testing::gaussian(rng);
      recs.push_back({p, c % 2 == 0 ? Label::kCovid : Label::kNonCovid, {}, {}});
    }
  }
  AnchorSet set = generate_anchors(recs, 4, 9);
  std::vector<Point> cents;
  for (const auto& a : set.anchors) cents.push_back(a.centroid);
  for (int q = 0; q < 200; ++q) {
    Point v = random_points(rng, 1, 3)[0];
    for (auto& x : v) x = x * 2 + 4;
    CHECK(classify(v, {}, set).decision.anchor_index == testing::brute_force_nearest(v, cents));
  }
}

TEST_CASE("property: translation equivariance") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Point> pts;
    for (int c = 0; c < 3; ++c) {
      for (int i = 0; i < 10; ++i) pts.push_back({c * 10.0 + testing::gaussian(rng) * 0.3,
                                                   c * -5.0 + testing::gaussian(rng) * 0.3});
    }
    const Point shift = {testing::gaussian(rng) * 50, testing::gaussian(rng) * 50};
    std::vector<Point> moved = pts;
    for (auto& p : moved) {
      for (std::size_t j = 0; j < 2; ++j) p[j] += shift[j];
    }
    const auto a = kmeans(pts, 3, 5);
    const auto b = kmeans(moved, 3, 5);
    CHECK(a.assignment == b.assignment);
    AnchorSet sa = generate_anchors(records_from(pts), 3, 5);
    AnchorSet sb = generate_anchors(records_from(moved), 3, 5);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(sb.anchors[k].centroid[0] == doctest::Approx(sa.anchors[k].centroid[0] + shift[0]));
      CHECK(sb.anchors[k].centroid[1] == doctest::Approx(sa.anchors[k].centroid[1] + shift[1]));
      CHECK(sb.anchors[k].radius == doctest::Approx(sa.anchors[k].radius));
    }
    const Point q = {pts[3][0] + 0.4, pts[3][1] - 0.2};
    const Point mq = {q[0] + shift[0], q[1] + shift[1]};
    auto ca = classify(q, {}, sa);
    auto cb = classify(mq, {}, sb);
    CHECK(ca.decision.anchor_index == cb.decision.anchor_index);
    CHECK(ca.decision.confidence == doctest::Approx(cb.decision.confidence));
  }
}

TEST_CASE("anchor set validation reports field paths") {
  AnchorSet set = two_anchor_set();
  CHECK_NOTHROW(set.validate());
  set.anchors[1].radius = -1;
  try {
    set.validate();
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kValidationError);
    CHECK(std::string(e.what()).rfind("anchors[1].radius", 0) == 0);
  }
  set = two_anchor_set();
  set.anchors[1].id = "a";
  CHECK_THROWS_AS(set.validate(), Error);
  set = two_anchor_set();
  set.anchors.clear();
  CHECK_THROWS_AS(set.validate(), Error);
}
