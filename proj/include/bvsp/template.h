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

// Reversible target-sequence templates.
//
// The registry holds 26 templates:
//
//   gas         "(x_at, x_ac, x_sp, x_ot)"
//   paraphrase  "x_ac is x_sp because x_at is x_ot"
//   marker_*    "[AT] x_at [OT] x_ot [AC] x_ac [SP] x_sp" in each of the 24
//               element orders, e.g. marker_AT_AC_SP_OT.
//
// Every template is a layout L0 e1 L1 e2 L2 e3 L3 e4 L4 of five linking
// literals around four elements. Clauses for multiple quads are joined with
// " [SSEP] ". Parsing is the greedy left-to-right inverse: the first
// occurrence of each inner literal after the previous one splits the clause.

#ifndef BVSP_TEMPLATE_H_
#define BVSP_TEMPLATE_H_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bvsp/quad.h"

namespace bvsp {

enum class TemplateKind { kTuple, kParaphrase, kMarker };

const char *TemplateKindName(TemplateKind kind);

inline constexpr std::string_view kSeparator = "[SSEP]";
inline constexpr std::string_view kSeparatorJoin = " [SSEP] ";

struct Template {
  std::string id;
  TemplateKind kind = TemplateKind::kMarker;
  std::array<Role, 4> element_order{};
  // linking_literals[i] precedes the i-th element; [4] closes the clause.
  std::array<std::string, 5> linking_literals;

  // e.g. "AT,AC,SP,OT".
  std::string ElementOrderString() const;
};

struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const CharSpan &, const CharSpan &) = default;
};

struct ElementSpan {
  std::size_t quad_index = 0;
  Role role = Role::kAspect;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const ElementSpan &, const ElementSpan &) = default;
};

struct TargetSequence {
  std::string text;
  // One span per element occurrence, in text order.
  std::vector<ElementSpan> elements;
  // Spans of the "[SSEP]" tokens (without the surrounding spaces).
  std::vector<CharSpan> separators;
};

// gas, paraphrase, then the 24 marker orders in lexicographic order of the
// element permutation (roles compared as AT < OT < AC < SP).
const std::vector<Template> &ListTemplates();

// Throws UnknownTemplate.
const Template &FindTemplate(std::string_view id);

// Checks that `q` can be rendered by `t` and parsed back unchanged. Throws
// MarkerCollision when a field contains "[SSEP]" or one of the template's
// linking literals (or would make the greedy split ambiguous), and
// InvalidArgument when a field is empty, padded with whitespace, or the
// polarity is not a surface word.
void CheckRenderable(const SurfaceQuad &q, const Template &t);
bool IsRenderable(const SurfaceQuad &q, const Template &t);

// Renders quads as one clause each, in input order, joined by " [SSEP] ".
// Throws InvalidArgument on an empty list, plus the CheckRenderable errors.
TargetSequence Render(std::span<const SurfaceQuad> quads, const Template &t);

struct ParseResult {
  std::vector<SurfaceQuad> quads;
  std::size_t malformed = 0;
};

// Never throws on content. Clauses that do not match the template grammar,
// or whose fields would not render back to the same clause, are dropped and
// counted in `malformed`. Implicitness flags are inferred from the "it"
// surface word. Blank text parses to no quads and no malformed clauses.
ParseResult Parse(std::string_view text, const Template &t);

// The complement of the element spans: every maximal character range of
// `target.text` not covered by an element (linking literals, separators).
std::vector<CharSpan> LinkingSpans(const TargetSequence &target);

}  // namespace bvsp

#endif  // BVSP_TEMPLATE_H_
