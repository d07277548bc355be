/*
 * ml2.cpp
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

#include "mlpod/ml2/ml2.hpp"

#include <expat.h>

#include <algorithm>
#include <limits>
#include <memory>
#include <set>

#include "mlpod/common/error.hpp"

namespace mlpod::ml2 {
namespace {

bool is_identifier(std::string_view s) {
  if (s.empty() || s.size() > 64) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

bool is_version_selector(std::string_view s) {
  if (s == "latest") return true;
  if (s.empty() || s.size() > 9 || s[0] == '0') return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == ',' || c == '\t' || c == '\n' || c == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default: out += c;
    }
  }
  return out;
}

struct ElementRule {
  const char* name;
  const char* parent;  // nullptr for the root
  std::vector<std::string_view> required;
  std::vector<std::string_view> optional;
};

const std::vector<ElementRule>& rules() {
  static const std::vector<ElementRule> table = {
      {"ml2", nullptr, {"name"}, {}},
      {"inputs", "ml2", {}, {}},
      {"models", "ml2", {}, {}},
      {"pipeline", "ml2", {}, {}},
      {"render", "ml2", {}, {"title"}},
      {"input", "inputs", {"id", "kind"}, {"required"}},
      {"model", "models", {"id", "service", "name"}, {"version"}},
      {"step", "pipeline", {"id", "model", "env"}, {"depends-on", "timeout-seconds"}},
      {"in", "step", {"bind"}, {}},
      {"out", "step", {"id"}, {}},
      {"section", "render", {"kind", "source"}, {}},
  };
  return table;
}

class Parser {
 public:
  Parser() : xml_(XML_ParserCreate("UTF-8")) {
    if (!xml_) fail(Errc::kInternal, "cannot allocate XML parser");
    XML_SetUserData(xml_, this);
    XML_SetElementHandler(xml_, &Parser::on_start, &Parser::on_end);
    XML_SetCharacterDataHandler(xml_, &Parser::on_text);
    XML_SetStartDoctypeDeclHandler(xml_, &Parser::on_doctype);
    XML_SetProcessingInstructionHandler(xml_, &Parser::on_pi);
  }
  ~Parser() { XML_ParserFree(xml_); }
  Parser(const Parser&) = delete;
  Parser& operator=(const Parser&) = delete;

  Document run(std::string_view text) {
    if (text.size() > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
      fail(Errc::kParseError, "document too large");
    }
    const auto status = XML_Parse(xml_, text.data(), static_cast<int>(text.size()), XML_TRUE);
    if (error_) throw *error_;
    if (status != XML_STATUS_OK) {
      const Location at{static_cast<int>(XML_GetCurrentLineNumber(xml_)),
                        static_cast<int>(XML_GetCurrentColumnNumber(xml_)) + 1};
      fail(Errc::kParseError,
           at.str() + ": malformed XML: " + XML_ErrorString(XML_GetErrorCode(xml_)));
    }
    if (!seen_root_) fail(Errc::kParseError, "1:1: no <ml2> element");
    return std::move(doc_);
  }

 private:
  using Attrs = std::map<std::string, std::string, std::less<>>;

  Location here() const {
    return {static_cast<int>(XML_GetCurrentLineNumber(xml_)),
            static_cast<int>(XML_GetCurrentColumnNumber(xml_)) + 1};
  }

  void schema_error(const Location& at, const std::string& message) {
    if (!error_) error_ = Error(Errc::kSchemaError, at.str() + ": " + message);
    XML_StopParser(xml_, XML_FALSE);
  }

  static void on_start(void* self, const XML_Char* name, const XML_Char** attrs) {
    static_cast<Parser*>(self)->start(name, attrs);
  }
  static void on_end(void* self, const XML_Char*) {
    auto* p = static_cast<Parser*>(self);
    if (!p->stack_.empty()) p->stack_.pop_back();
  }
  static void on_text(void* self, const XML_Char* s, int len) {
    auto* p = static_cast<Parser*>(self);
    if (p->error_) return;
    for (int i = 0; i < len; ++i) {
      if (s[i] != ' ' && s[i] != '\t' && s[i] != '\n' && s[i] != '\r') {
        p->schema_error(p->here(), "unexpected text content");
        return;
      }
    }
  }
  static void on_doctype(void* self, const XML_Char*, const XML_Char*, const XML_Char*, int) {
    auto* p = static_cast<Parser*>(self);
    p->schema_error(p->here(), "DOCTYPE declarations are not allowed");
  }
  static void on_pi(void* self, const XML_Char*, const XML_Char*) {
    auto* p = static_cast<Parser*>(self);
    p->schema_error(p->here(), "processing instructions are not allowed");
  }

  void start(const std::string& name, const XML_Char** raw_attrs) {
    if (error_) return;
    const Location at = here();
    const std::string parent = stack_.empty() ? "" : stack_.back();
    const ElementRule* rule = nullptr;
    for (const auto& r : rules()) {
      if (name == r.name) rule = &r;
    }
    if (!rule) return schema_error(at, "unknown element <" + name + ">");
    if ((rule->parent == nullptr) != parent.empty() ||
        (rule->parent != nullptr && parent != rule->parent)) {
      return schema_error(at, "<" + name + "> is not allowed " +
                                  (parent.empty() ? std::string("at the top level")
                                                  : "inside <" + parent + ">"));
    }
    if (rule->parent && std::string_view(rule->parent) == "ml2") {
      if (!sections_seen_.insert(name).second) {
        return schema_error(at, "<" + name + "> may appear only once");
      }
    }
    Attrs attrs;
    for (int i = 0; raw_attrs[i]; i += 2) {
      const std::string key = raw_attrs[i];
      const bool known =
          std::find(rule->required.begin(), rule->required.end(), key) != rule->required.end() ||
          std::find(rule->optional.begin(), rule->optional.end(), key) != rule->optional.end();
      if (!known) return schema_error(at, "unknown attribute " + key + " on <" + name + ">");
      attrs[key] = raw_attrs[i + 1];
    }
    for (auto req : rule->required) {
      if (!attrs.count(req)) {
        return schema_error(at, "<" + name + "> requires attribute " + std::string(req));
      }
    }
    stack_.push_back(name);
    build(name, attrs, at);
  }

  bool check_id(const Attrs& attrs, const char* key, const Location& at) {
    if (is_identifier(attrs.find(key)->second)) return true;
    schema_error(at, std::string(key) + " must match [A-Za-z0-9._-]{1,64}");
    return false;
  }

  void build(const std::string& name, const Attrs& a, const Location& at) {
    auto get = [&a](const char* key) { return a.find(key)->second; };
    if (name == "ml2") {
      seen_root_ = true;
      doc_.name = get("name");
      if (doc_.name.empty()) schema_error(at, "name must be non-empty");
    } else if (name == "input") {
      Input in;
      if (!check_id(a, "id", at)) return;
      in.id = get("id");
      const std::string kind = get("kind");
      if (kind == "dicom-series") {
        in.kind = InputKind::kDicomSeries;
      } else if (kind == "object") {
        in.kind = InputKind::kObject;
      } else {
        return schema_error(at, "kind must be dicom-series|object");
      }
      if (auto it = a.find("required"); it != a.end()) {
        if (it->second != "true" && it->second != "false") {
          return schema_error(at, "required must be true|false");
        }
        in.required = it->second == "true";
      }
      in.where = at;
      doc_.inputs.push_back(std::move(in));
    } else if (name == "model") {
      Model m;
      if (!check_id(a, "id", at) || !check_id(a, "service", at) || !check_id(a, "name", at)) return;
      m.id = get("id");
      m.service = get("service");
      m.name = get("name");
      if (auto it = a.find("version"); it != a.end()) {
        if (!is_version_selector(it->second)) {
          return schema_error(at, "version must be latest or a positive integer");
        }
        m.version = it->second;
      }
      m.where = at;
      doc_.models.push_back(std::move(m));
    } else if (name == "step") {
      Step s;
      if (!check_id(a, "id", at) || !check_id(a, "model", at)) return;
      s.id = get("id");
      s.model = get("model");
      const std::string env = get("env");
      if (env == "cloud") {
        s.env = Env::kCloud;
      } else if (env == "edge") {
        s.env = Env::kEdge;
      } else {
        return schema_error(at, "env must be cloud|edge");
      }
      if (auto it = a.find("depends-on"); it != a.end()) {
        s.depends_on = split_list(it->second);
        for (const auto& d : s.depends_on) {
          if (!is_identifier(d)) return schema_error(at, "depends-on entry " + d + " is not an id");
        }
      }
      if (auto it = a.find("timeout-seconds"); it != a.end()) {
        const std::string& t = it->second;
        if (!is_version_selector(t) || t == "latest") {
          return schema_error(at, "timeout-seconds must be a positive integer");
        }
        s.timeout_seconds = std::stoi(t);
      }
      s.where = at;
      doc_.steps.push_back(std::move(s));
    } else if (name == "in") {
      if (!check_id(a, "bind", at)) return;
      doc_.steps.back().inputs.push_back(get("bind"));
    } else if (name == "out") {
      if (!check_id(a, "id", at)) return;
      doc_.steps.back().outputs.push_back(get("id"));
    } else if (name == "render") {
      Render r;
      if (auto it = a.find("title"); it != a.end()) r.title = it->second;
      r.where = at;
      doc_.render = std::move(r);
    } else if (name == "section") {
      static const std::pair<const char*, SectionKind> kinds[] = {
          {"probability", SectionKind::kProbability},
          {"label", SectionKind::kLabel},
          {"confidence", SectionKind::kConfidence},
          {"anchor-images", SectionKind::kAnchorImages},
          {"similar-slices", SectionKind::kSimilarSlices},
          {"text", SectionKind::kText}};
      Section sec;
      const std::string kind = get("kind");
      auto it = std::find_if(std::begin(kinds), std::end(kinds),
                             [&](const auto& k) { return kind == k.first; });
      if (it == std::end(kinds)) {
        return schema_error(
            at, "section kind must be probability|label|confidence|anchor-images|similar-slices|text");
      }
      if (!check_id(a, "source", at)) return;
      sec.kind = it->second;
      sec.source = get("source");
      sec.where = at;
      doc_.render->sections.push_back(std::move(sec));
    }
  }

  XML_Parser xml_;
  Document doc_;
  std::vector<std::string> stack_;
  std::set<std::string> sections_seen_;
  bool seen_root_ = false;
  std::optional<Error> error_;
};

}  // namespace

std::string Location::str() const {
  return std::to_string(line) + ":" + std::to_string(column);
}

std::string Diagnostic::str() const { return where.str() + ": " + message; }

std::string_view input_kind_name(InputKind k) {
  return k == InputKind::kDicomSeries ? "dicom-series" : "object";
}

std::string_view env_name(Env e) { return e == Env::kCloud ? "cloud" : "edge"; }

std::string_view section_kind_name(SectionKind k) {
  switch (k) {
    case SectionKind::kProbability: return "probability";
    case SectionKind::kLabel: return "label";
    case SectionKind::kConfidence: return "confidence";
    case SectionKind::kAnchorImages: return "anchor-images";
    case SectionKind::kSimilarSlices: return "similar-slices";
    case SectionKind::kText: return "text";
  }
  return "text";
}

const Model* Document::find_model(std::string_view id) const {
  for (const auto& m : models) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

const Step* Document::find_step(std::string_view id) const {
  for (const auto& s : steps) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

Document parse(std::string_view xml) {
  Parser p;
  return p.run(xml);
}

std::string serialize(const Document& doc) {
  std::string out = "<ml2 name=\"" + escape(doc.name) + "\">\n";
  if (!doc.inputs.empty()) {
    out += "  <inputs>\n";
    for (const auto& in : doc.inputs) {
      out += "    <input id=\"" + escape(in.id) + "\" kind=\"" +
             std::string(input_kind_name(in.kind)) + "\" required=\"" +
             (in.required ? "true" : "false") + "\"/>\n";
    }
    out += "  </inputs>\n";
  }
  if (!doc.models.empty()) {
    out += "  <models>\n";
    for (const auto& m : doc.models) {
      out += "    <model id=\"" + escape(m.id) + "\" service=\"" + escape(m.service) +
             "\" name=\"" + escape(m.name) + "\" version=\"" + escape(m.version) + "\"/>\n";
    }
    out += "  </models>\n";
  }
  if (!doc.steps.empty()) {
    out += "  <pipeline>\n";
    for (const auto& s : doc.steps) {
      out += "    <step id=\"" + escape(s.id) + "\" model=\"" + escape(s.model) + "\" env=\"" +
             std::string(env_name(s.env)) + "\"";
      if (!s.depends_on.empty()) {
        std::string deps;
        for (const auto& d : s.depends_on) deps += (deps.empty() ? "" : " ") + d;
        out += " depends-on=\"" + escape(deps) + "\"";
      }
      if (s.timeout_seconds) out += " timeout-seconds=\"" + std::to_string(*s.timeout_seconds) + "\"";
      out += ">\n";
      for (const auto& b : s.inputs) out += "      <in bind=\"" + escape(b) + "\"/>\n";
      for (const auto& o : s.outputs) out += "      <out id=\"" + escape(o) + "\"/>\n";
      out += "    </step>\n";
    }
    out += "  </pipeline>\n";
  }
  if (doc.render) {
    out += "  <render title=\"" + escape(doc.render->title) + "\">\n";
    for (const auto& sec : doc.render->sections) {
      out += "    <section kind=\"" + std::string(section_kind_name(sec.kind)) + "\" source=\"" +
             escape(sec.source) + "\"/>\n";
    }
    out += "  </render>\n";
  }
  out += "</ml2>\n";
  return out;
}

std::vector<Diagnostic> validate(const Document& doc,
                                 const std::map<std::string, std::string>& registry) {
  std::vector<Diagnostic> out;
  auto report = [&out](const Location& at, std::string msg) {
    out.push_back({at, std::move(msg)});
  };

  std::set<std::string> input_ids, model_ids, step_ids, bindings, outputs, consumed;
  for (const auto& in : doc.inputs) {
    if (!input_ids.insert(in.id).second) report(in.where, "duplicate input id " + in.id);
    bindings.insert(in.id);
  }
  for (const auto& m : doc.models) {
    if (!model_ids.insert(m.id).second) report(m.where, "duplicate model id " + m.id);
    if (!registry.count(m.service)) {
      report(m.where, "model " + m.id + " names unknown service " + m.service);
    }
  }
  for (const auto& s : doc.steps) {
    if (!step_ids.insert(s.id).second) report(s.where, "duplicate step id " + s.id);
    for (const auto& o : s.outputs) {
      if (!bindings.insert(o).second) {
        report(s.where, "binding " + o + " is defined more than once");
      }
      outputs.insert(o);
    }
  }
  for (const auto& s : doc.steps) {
    if (!model_ids.count(s.model)) {
      report(s.where, "step " + s.id + " references unknown model " + s.model);
    }
    for (const auto& b : s.inputs) {
      consumed.insert(b);
      if (!bindings.count(b)) report(s.where, "step " + s.id + " binds unknown input " + b);
    }
    for (const auto& d : s.depends_on) {
      if (!step_ids.count(d)) report(s.where, "step " + s.id + " depends on unknown step " + d);
    }
  }
  for (const auto& in : doc.inputs) {
    if (in.required && !consumed.count(in.id)) {
      report(in.where, "required input " + in.id + " is not consumed by any step");
    }
  }
  if (doc.render) {
    for (const auto& sec : doc.render->sections) {
      if (!outputs.count(sec.source)) {
        report(sec.where, "render source " + sec.source + " is not produced by any step");
      }
    }
  }
  return out;
}

ExecutionPlan compile(const Document& doc) {
  ExecutionPlan plan;
  plan.doc = doc;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < doc.steps.size(); ++i) {
    if (!index.emplace(doc.steps[i].id, i).second) {
      fail(Errc::kValidationError, doc.steps[i].where.str() + ": duplicate step id " + doc.steps[i].id);
    }
    for (const auto& o : doc.steps[i].outputs) {
      if (!plan.producers.emplace(o, doc.steps[i].id).second) {
        fail(Errc::kValidationError, doc.steps[i].where.str() + ": binding " + o +
                                         " is produced by more than one step");
      }
    }
  }

  const std::size_t n = doc.steps.size();
  std::vector<std::set<std::size_t>> deps(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Step& s = doc.steps[i];
    for (const auto& d : s.depends_on) {
      auto it = index.find(d);
      if (it == index.end()) {
        fail(Errc::kValidationError, s.where.str() + ": step " + s.id + " depends on unknown step " + d);
      }
      deps[i].insert(it->second);
    }
    for (const auto& b : s.inputs) {
      if (auto it = plan.producers.find(b); it != plan.producers.end()) {
        deps[i].insert(index.at(it->second));
      }
    }
    auto& named = plan.dependencies[s.id];
    for (std::size_t d : deps[i]) named.push_back(doc.steps[d].id);
  }

  std::vector<std::size_t> pending(n);
  std::vector<std::vector<std::size_t>> dependents(n);
  for (std::size_t i = 0; i < n; ++i) {
    pending[i] = deps[i].size();
    for (std::size_t d : deps[i]) dependents[d].push_back(i);
  }
  std::vector<bool> placed(n, false);
  std::size_t placed_count = 0;
  while (placed_count < n) {
    std::vector<std::size_t> layer;
    for (std::size_t i = 0; i < n; ++i) {
      if (!placed[i] && pending[i] == 0) layer.push_back(i);
    }
    if (layer.empty()) break;
    std::vector<std::string> ids;
    for (std::size_t i : layer) {
      placed[i] = true;
      ++placed_count;
      ids.push_back(doc.steps[i].id);
    }
    for (std::size_t i : layer) {
      for (std::size_t d : dependents[i]) --pending[d];
    }
    plan.stages.push_back(std::move(ids));
  }

  if (placed_count < n) {
    // Every unplaced step waits on another unplaced step, so walking
    // dependencies from any of them must revisit a step.
    std::size_t cur = 0;
    while (placed[cur]) ++cur;
    std::vector<std::size_t> order;
    std::map<std::size_t, std::size_t> seen_at;
    while (!seen_at.count(cur)) {
      seen_at[cur] = order.size();
      order.push_back(cur);
      for (std::size_t d : deps[cur]) {
        if (!placed[d]) {
          cur = d;
          break;
        }
      }
    }
    std::vector<std::size_t> cycle(order.begin() + static_cast<long>(seen_at[cur]), order.end());
    std::sort(cycle.begin(), cycle.end());
    std::string names;
    for (std::size_t i : cycle) names += (names.empty() ? "" : ", ") + doc.steps[i].id;
    fail(Errc::kCycleDetected, "cycle detected among steps: " + names);
  }
  return plan;
}

}  // namespace mlpod::ml2
