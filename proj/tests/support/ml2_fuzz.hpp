/*
 * ml2_fuzz.hpp
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

// Random ML2-ish documents. Odd cases mutate the canonical document; even
// cases build tag soup from the schema's vocabulary.

#include <random>
#include <string>
#include <vector>

namespace mlpod::testing {

inline std::string random_ml2(std::mt19937_64& rng, const std::string& base, int i) {
  const std::vector<std::string> names = {"ml2", "inputs", "input", "models", "model", "pipeline",
                                          "step", "in", "out", "render", "section", "bogus", "x"};
  const std::vector<std::string> attrs = {"name", "id", "kind", "required", "service", "version",
                                          "model", "env", "depends-on", "bind", "source", "title",
                                          "timeout-seconds", "zz"};
  const std::vector<std::string> values = {"x", "s1", "cloud", "edge", "fog", "true", "latest", "3",
                                           "dicom-series", "object", "probability", "", "a b", "&amp;",
                                           "<", "\"", "0"};
  std::string doc;
  if (i % 2) {
    // Mutations of the canonical document reach deeper into the schema.
    doc = base;
    const int edits = 1 + static_cast<int>(rng() % 3);
    for (int e = 0; e < edits && !doc.empty(); ++e) {
      const std::size_t at = rng() % doc.size();
      switch (rng() % 4) {
        case 0: doc[at] = static_cast<char>(rng() % 128); break;
        case 1: doc.erase(at, 1 + rng() % 12); break;
        case 2: doc.insert(at, values[rng() % values.size()]); break;
        default: {
          const std::size_t from = rng() % doc.size();
          doc.insert(at, doc.substr(from, 1 + rng() % 40));
        }
      }
    }
  }
  const int tokens = doc.empty() ? 1 + static_cast<int>(rng() % 25) : 0;
  std::vector<std::string> open;
  for (int t = 0; t < tokens; ++t) {
    const auto r = rng() % 10;
    if (r < 5) {
      const std::string& n = names[rng() % names.size()];
      doc += "<" + n;
      const int na = static_cast<int>(rng() % 4);
      for (int a = 0; a < na; ++a) {
        doc += " " + attrs[rng() % attrs.size()] + "=\"" + values[rng() % values.size()] + "\"";
      }
      if (rng() % 2) {
        doc += "/>";
      } else {
        doc += ">";
        open.push_back(n);
      }
    } else if (r < 8 && !open.empty()) {
      doc += "</" + open.back() + ">";
      open.pop_back();
    } else if (r == 8) {
      doc += std::string(1, static_cast<char>(rng() % 128));
    } else {
      doc += " ";
    }
  }
  if (tokens > 0 && rng() % 2) {
    while (!open.empty()) {
      doc += "</" + open.back() + ">";
      open.pop_back();
    }
  }
  return doc;
}

}  // namespace mlpod::testing
