// Copyright 2026 The bvsp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bvsp/template.h"

#include <algorithm>
#include <optional>

#include "bvsp/error.h"
#include "bvsp/text.h"

namespace bvsp {

const char *TemplateKindName(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::kTuple: return "tuple";
    case TemplateKind::kParaphrase: return "paraphrase";
    case TemplateKind::kMarker: return "marker";
  }
  return "unknown";
}

std::string Template::ElementOrderString() const {
  std::string out;
  for (std::size_t i = 0; i < element_order.size(); ++i) {
    if (i > 0) out += ',';
    out += RoleCode(element_order[i]);
  }
  return out;
}

namespace {

std::string Marker(Role r) { return std::string("[") + RoleCode(r) + "]"; }

std::vector<Template> BuildRegistry() {
  std::vector<Template> templates;

  Template gas;
  gas.id = "gas";
  gas.kind = TemplateKind::kTuple;
  gas.element_order = {Role::kAspect, Role::kCategory, Role::kPolarity,
                       Role::kOpinion};
  gas.linking_literals = {"(", ", ", ", ", ", ", ")"};
  templates.push_back(gas);

  Template para;
  para.id = "paraphrase";
  para.kind = TemplateKind::kParaphrase;
  para.element_order = {Role::kCategory, Role::kPolarity, Role::kAspect,
                        Role::kOpinion};
  para.linking_literals = {"", " is ", " because ", " is ", ""};
  templates.push_back(para);

  std::array<int, 4> perm = {0, 1, 2, 3};
  do {
    Template m;
    m.kind = TemplateKind::kMarker;
    m.id = "marker";
    for (std::size_t i = 0; i < 4; ++i) {
      const Role r = kAllRoles[perm[i]];
      m.element_order[i] = r;
      m.id += '_';
      m.id += RoleCode(r);
      m.linking_literals[i] = (i == 0 ? "" : " ") + Marker(r) + " ";
    }
    m.linking_literals[4] = "";
    templates.push_back(m);
  } while (std::next_permutation(perm.begin(), perm.end()));

  return templates;
}

// Returns an error message when `field` cannot occupy slot `slot` of `t`.
std::optional<std::string> FieldProblem(const std::string &field,
                                        std::size_t slot, const Template &t) {
  if (field.empty()) return "empty field";
  if (Trim(field).size() != field.size()) {
    return "field '" + field + "' has leading or trailing whitespace";
  }
  if (field.find(kSeparator) != std::string::npos) {
    return "field '" + field + "' contains " + std::string(kSeparator);
  }
  if (t.kind == TemplateKind::kMarker) {
    for (Role r : kAllRoles) {
      if (field.find(Marker(r)) != std::string::npos) {
        return "field '" + field + "' contains marker " + Marker(r);
      }
    }
  }
  for (std::size_t i = 1; i <= 3; ++i) {
    if (field.find(t.linking_literals[i]) != std::string::npos) {
      return "field '" + field + "' contains linking literal '" +
             t.linking_literals[i] + "'";
    }
  }
  // The greedy split must land exactly after this field.
  if (slot < 3) {
    const std::string &next = t.linking_literals[slot + 1];
    if ((field + next).find(next) != field.size()) {
      return "field '" + field + "' runs into linking literal '" + next + "'";
    }
  }
  return std::nullopt;
}

}  // namespace

const std::vector<Template> &ListTemplates() {
  static const std::vector<Template> registry = BuildRegistry();
  return registry;
}

const Template &FindTemplate(std::string_view id) {
  for (const auto &t : ListTemplates()) {
    if (t.id == id) return t;
  }
  throw Error(ErrorCode::kUnknownTemplate, "no template '" + std::string(id) + "'");
}

void CheckRenderable(const SurfaceQuad &q, const Template &t) {
  if (!PolarityFromSurface(q.polarity)) {
    throw Error(ErrorCode::kInvalidArgument,
                "polarity '" + q.polarity + "' is not a surface word");
  }
  for (std::size_t slot = 0; slot < 4; ++slot) {
    const std::string &field = q.field(t.element_order[slot]);
    if (auto problem = FieldProblem(field, slot, t)) {
      const bool collision = !field.empty() && Trim(field).size() == field.size();
      throw Error(collision ? ErrorCode::kMarkerCollision
                            : ErrorCode::kInvalidArgument,
                  *problem + " (template " + t.id + ")");
    }
  }
}

bool IsRenderable(const SurfaceQuad &q, const Template &t) {
  if (!PolarityFromSurface(q.polarity)) return false;
  for (std::size_t slot = 0; slot < 4; ++slot) {
    if (FieldProblem(q.field(t.element_order[slot]), slot, t)) return false;
  }
  return true;
}

TargetSequence Render(std::span<const SurfaceQuad> quads, const Template &t) {
  if (quads.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot render an empty quad list");
  }
  TargetSequence out;
  for (std::size_t qi = 0; qi < quads.size(); ++qi) {
    const SurfaceQuad &q = quads[qi];
    CheckRenderable(q, t);
    if (qi > 0) {
      const std::size_t sep_start = out.text.size() + 1;
      out.text += kSeparatorJoin;
      out.separators.push_back({sep_start, sep_start + kSeparator.size()});
    }
    for (std::size_t slot = 0; slot < 4; ++slot) {
      out.text += t.linking_literals[slot];
      const Role role = t.element_order[slot];
      const std::string &value = q.field(role);
      const std::size_t start = out.text.size();
      out.text += value;
      out.elements.push_back({qi, role, start, out.text.size()});
    }
    out.text += t.linking_literals[4];
  }
  return out;
}

namespace {

std::optional<SurfaceQuad> ParseClause(std::string_view clause,
                                       const Template &t) {
  const std::string &head = t.linking_literals[0];
  const std::string &tail = t.linking_literals[4];
  if (clause.size() < head.size() + tail.size()) return std::nullopt;
  if (clause.substr(0, head.size()) != head) return std::nullopt;
  if (clause.substr(clause.size() - tail.size()) != tail) return std::nullopt;
  std::string_view body =
      clause.substr(head.size(), clause.size() - head.size() - tail.size());

  SurfaceQuad q;
  for (std::size_t slot = 0; slot < 4; ++slot) {
    std::string_view value;
    if (slot < 3) {
      const std::string &next = t.linking_literals[slot + 1];
      const std::size_t pos = body.find(next);
      if (pos == std::string_view::npos) return std::nullopt;
      value = body.substr(0, pos);
      body = body.substr(pos + next.size());
    } else {
      value = body;
    }
    q.field(t.element_order[slot]) = std::string(Trim(value));
  }
  q = WithInferredImplicitness(std::move(q));
  if (!IsRenderable(q, t)) return std::nullopt;
  return q;
}

}  // namespace

ParseResult Parse(std::string_view text, const Template &t) {
  ParseResult result;
  if (Trim(text).empty()) return result;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(kSeparator, pos);
    const std::string_view clause = Trim(
        text.substr(pos, next == std::string_view::npos ? std::string_view::npos
                                                        : next - pos));
    if (auto q = ParseClause(clause, t)) {
      result.quads.push_back(std::move(*q));
    } else {
      ++result.malformed;
    }
    if (next == std::string_view::npos) break;
    pos = next + kSeparator.size();
  }
  return result;
}

std::vector<CharSpan> LinkingSpans(const TargetSequence &target) {
  std::vector<CharSpan> spans;
  std::size_t cursor = 0;
  for (const auto &e : target.elements) {
    if (e.start > cursor) spans.push_back({cursor, e.start});
    cursor = std::max(cursor, e.end);
  }
  if (cursor < target.text.size()) spans.push_back({cursor, target.text.size()});
  return spans;
}

}  // namespace bvsp
