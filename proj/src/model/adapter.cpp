/*
 * adapter.cpp
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

#include "mlpod/model/adapter.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "json.hpp"
#include "mlpod/common/error.hpp"
#include "mlpod/common/util.hpp"

namespace mlpod::model {
namespace {

using Json = nlohmann::json;

constexpr double kIntensityScale = 1.0 / 4096.0;

// Box-Muller over a 64-bit Mersenne Twister; spelled out so weights are
// identical across standard library implementations.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 rng_;
};

std::vector<double> draw(Gaussian& g, std::size_t n, double scale) {
  std::vector<double> out(n);
  for (auto& v : out) v = g() * scale;
  return out;
}

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void ScanInput::validate() const {
  if (slices.empty()) fail(Errc::kInvalidArgument, "scan has no slices");
  const auto& first = slices.front();
  for (std::size_t i = 0; i < slices.size(); ++i) {
    const auto& s = slices[i];
    if (s.width == 0 || s.height == 0) {
      fail(Errc::kInvalidArgument, "slice " + std::to_string(i) + " is empty");
    }
    if (s.pixels.size() != static_cast<std::size_t>(s.width) * s.height) {
      fail(Errc::kInvalidArgument,
           "slice " + std::to_string(i) + " pixel count does not match its dimensions");
    }
    if (s.width != first.width || s.height != first.height) {
      fail(Errc::kInvalidArgument, "slice " + std::to_string(i) + " is " +
                                       std::to_string(s.width) + "x" +
                                       std::to_string(s.height) + ", expected " +
                                       std::to_string(first.width) + "x" +
                                       std::to_string(first.height));
    }
  }
}

SliceStats slice_statistics(const Slice& slice) {
  SliceStats st{};
  const std::size_t w = slice.width;
  const std::size_t h = slice.height;
  const std::size_t n = w * h;
  if (n == 0 || slice.pixels.size() != n) fail(Errc::kInvalidArgument, "empty slice");

  double sum = 0, sum_sq = 0;
  double lo = slice.pixels[0], hi = slice.pixels[0];
  std::array<double, 4> quad_sum{};
  std::array<std::size_t, 4> quad_count{};
  std::vector<double> row_sum(h, 0.0);
  double grad = 0;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double v = slice.pixels[y * w + x];
      sum += v;
      sum_sq += v * v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      const std::size_t q = (y < (h + 1) / 2 ? 0 : 2) + (x < (w + 1) / 2 ? 0 : 1);
      quad_sum[q] += v;
      ++quad_count[q];
      row_sum[y] += v;
      if (x + 1 < w) grad += std::pow(slice.pixels[y * w + x + 1] - v, 2);
      if (y + 1 < h) grad += std::pow(slice.pixels[(y + 1) * w + x] - v, 2);
    }
  }
  const double mean = sum / static_cast<double>(n);
  st[0] = mean;
  st[1] = std::sqrt(std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean));
  st[2] = lo;
  st[3] = hi;
  for (std::size_t q = 0; q < 4; ++q) {
    st[4 + q] = quad_count[q] ? quad_sum[q] / static_cast<double>(quad_count[q]) : 0.0;
  }
  double entropy = 0;
  if (sum > 0 && h > 1) {
    for (double r : row_sum) {
      if (r > 0) entropy -= (r / sum) * std::log2(r / sum);
    }
    entropy /= std::log2(static_cast<double>(h));
  }
  st[8] = entropy;
  st[9] = grad / static_cast<double>(n);
  return st;
}

StubModel::StubModel(ModelParams params) : params_(params) {
  if (params_.latent_dim == 0 || params_.feature_dim == 0) {
    fail(Errc::kInvalidArgument, "L and F must be positive");
  }
  const std::size_t L = params_.latent_dim;
  const std::size_t F = params_.feature_dim;
  Gaussian g(params_.seed);
  projection_ = draw(g, F * kSliceStatCount, 1.0 / std::sqrt(double(kSliceStatCount)));
  recurrent_ = draw(g, L * L, 0.5 / std::sqrt(double(L)));
  input_ = draw(g, L * F, 1.0 / std::sqrt(double(F)));
  readout_ = draw(g, L, 1.0 / std::sqrt(double(L)));
  bias_ = g() * 0.1;
}

Vector StubModel::slice_feature(const Slice& slice) const {
  const SliceStats st = slice_statistics(slice);
  std::array<double, kSliceStatCount> unit{};
  for (std::size_t i = 0; i < 8; ++i) unit[i] = st[i] * kIntensityScale;
  unit[8] = st[8];
  unit[9] = st[9] * kIntensityScale * kIntensityScale;
  Vector f(params_.feature_dim, 0.0);
  for (std::size_t r = 0; r < f.size(); ++r) {
    for (std::size_t c = 0; c < kSliceStatCount; ++c) {
      f[r] += projection_[r * kSliceStatCount + c] * unit[c];
    }
  }
  return f;
}

StubModel::Aggregate StubModel::aggregate(const std::vector<Vector>& slice_features) const {
  if (slice_features.empty()) fail(Errc::kInvalidArgument, "no slice features to aggregate");
  const std::size_t L = params_.latent_dim;
  const std::size_t F = params_.feature_dim;
  Vector h(L, 0.0), next(L);
  for (const auto& f : slice_features) {
    if (f.size() != F) fail(Errc::kInvalidArgument, "slice feature has the wrong dimension");
    for (std::size_t i = 0; i < L; ++i) {
      double acc = 0;
      for (std::size_t j = 0; j < L; ++j) acc += recurrent_[i * L + j] * h[j];
      for (std::size_t j = 0; j < F; ++j) acc += input_[i * F + j] * f[j];
      next[i] = std::tanh(acc);
    }
    h.swap(next);
  }
  double z = bias_;
  for (std::size_t i = 0; i < L; ++i) z += readout_[i] * h[i];
  return {std::move(h), logistic(z)};
}

InferenceResult StubModel::infer(const ScanInput& scan) const {
  scan.validate();
  InferenceResult r;
  r.slice_features.reserve(scan.slices.size());
  for (const auto& s : scan.slices) r.slice_features.push_back(slice_feature(s));
  auto agg = aggregate(r.slice_features);
  r.latent = std::move(agg.latent);
  r.probability = agg.probability;
  return r;
}

std::string InferenceResult::to_json() const {
  return Json{{"probability", probability},
              {"latent", latent},
              {"slice_features", slice_features},
              {"model_name", model_name},
              {"model_version", model_version}}
      .dump();
}

InferenceResult InferenceResult::from_json(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    InferenceResult r;
    r.probability = j.at("probability").get<double>();
    r.latent = j.at("latent").get<Vector>();
    r.slice_features = j.at("slice_features").get<std::vector<Vector>>();
    r.model_name = j.value("model_name", "");
    r.model_version = j.value("model_version", 0);
    return r;
  } catch (const Json::exception& e) {
    fail(Errc::kParseError, std::string("invalid inference result: ") + e.what());
  }
}

ModelManifest ModelManifest::from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(Errc::kParseError, std::string("manifest is not valid JSON: ") + e.what());
  }
  auto invalid = [](const std::string& field, const std::string& why) {
    fail(Errc::kValidationError, field + ": " + why);
  };
  if (!j.is_object()) invalid("$", "expected an object");
  ModelManifest m;
  auto positive = [&](const char* key, std::size_t fallback) -> std::size_t {
    if (!j.contains(key)) return fallback;
    const Json& v = j[key];
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1) invalid(key, "must be a positive integer");
    return v.get<std::size_t>();
  };
  if (!j.contains("name") || !j["name"].is_string()) invalid("name", "required string");
  m.name = j["name"].get<std::string>();
  if (!is_valid_object_id(m.name)) invalid("name", "must match [A-Za-z0-9._-]{1,128}");
  if (j.contains("version")) {
    if (!j["version"].is_number_integer() || j["version"].get<std::int64_t>() < 0) {
      invalid("version", "must be a non-negative integer");
    }
    m.version = j["version"].get<int>();
  }
  if (j.contains("kind")) {
    if (!j["kind"].is_string()) invalid("kind", "must be a string");
    m.kind = j["kind"].get<std::string>();
  }
  if (m.kind != "stub" && m.kind != "external" && m.kind != "anonymizer") {
    invalid("kind", "must be stub, external or anonymizer");
  }
  m.latent_dim = positive("L", m.latent_dim);
  m.feature_dim = positive("F", m.feature_dim);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) invalid("seed", "must be a non-negative integer");
    m.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("threshold")) {
    if (!j["threshold"].is_number()) invalid("threshold", "must be a number");
    m.threshold = j["threshold"].get<double>();
    if (!(m.threshold >= 0.0 && m.threshold <= 1.0)) invalid("threshold", "must lie in [0,1]");
  }
  if (j.contains("profile")) {
    if (!j["profile"].is_object()) invalid("profile", "must be an object");
    m.profile = j["profile"].dump();
  }
  if (m.kind == "anonymizer" && !m.profile) invalid("profile", "required for anonymizer models");
  return m;
}

std::string ModelManifest::to_json() const {
  Json j = {{"name", name},           {"version", version}, {"kind", kind},
            {"L", latent_dim},        {"F", feature_dim},   {"seed", seed},
            {"threshold", threshold}};
  if (profile) j["profile"] = Json::parse(*profile);
  return j.dump();
}

}  // namespace mlpod::model
