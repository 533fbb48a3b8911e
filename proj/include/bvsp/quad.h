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

// Domain types for aspect sentiment quads.
//
// A quad is (aspect term, opinion term, aspect category, sentiment polarity).
// Aspect and opinion terms may be implicit, i.e. not expressed in the
// sentence; released corpora spell this as the literal "NULL", but here it is
// a distinct state of Term so that a real token "NULL" or "it" is never
// confused with implicitness.
//
// Target sequences do not carry labels directly. A quad is first projected
// onto surface words (POS -> "great", implicit terms -> "it", ...) and the
// templates operate on those surface values.

#ifndef BVSP_QUAD_H_
#define BVSP_QUAD_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bvsp {

enum class Polarity { kPositive, kNeutral, kNegative };

// Element roles in canonical order: AT, OT, AC, SP.
enum class Role { kAspect = 0, kOpinion = 1, kCategory = 2, kPolarity = 3 };

inline constexpr std::array<Role, 4> kAllRoles = {
    Role::kAspect, Role::kOpinion, Role::kCategory, Role::kPolarity};

// "AT", "OT", "AC", "SP".
const char *RoleCode(Role role);
// "aspect_term", "opinion_term", "aspect_category", "sentiment_polarity".
const char *RoleName(Role role);
std::optional<Role> RoleFromCode(std::string_view code);

// "great", "ok", "bad".
const char *PolaritySurface(Polarity p);
std::optional<Polarity> PolarityFromSurface(std::string_view surface);
// "positive", "neutral", "negative".
const char *PolarityLabel(Polarity p);
// Accepts "positive"/"neutral"/"negative" and "POS"/"NEU"/"NEG", any case.
std::optional<Polarity> PolarityFromLabel(std::string_view label);

// Surface word substituted for implicit aspect and opinion terms.
inline constexpr std::string_view kImplicitSurface = "it";

class Term {
 public:
  // Default-constructed terms are implicit.
  Term() = default;

  static Term Implicit() { return Term(); }
  // Throws InvalidArgument on an empty string.
  static Term Explicit(std::string text);

  bool implicit() const { return !text_.has_value(); }
  // Precondition: !implicit().
  const std::string &text() const { return *text_; }

  friend bool operator==(const Term &, const Term &) = default;
  friend auto operator<=>(const Term &, const Term &) = default;

 private:
  explicit Term(std::string text) : text_(std::move(text)) {}
  std::optional<std::string> text_;
};

struct SentimentQuad {
  Term aspect;
  Term opinion;
  std::string category;
  Polarity polarity = Polarity::kPositive;

  // Throws InvalidArgument if the category is empty.
  void Validate() const;

  // Exact field-wise equality. Use Equivalent() for matching predictions.
  friend bool operator==(const SentimentQuad &, const SentimentQuad &) = default;
  friend auto operator<=>(const SentimentQuad &, const SentimentQuad &) = default;
};

struct SurfaceQuad {
  std::string aspect;
  std::string opinion;
  std::string category;
  std::string polarity;
  // Whether the aspect/opinion surface came from an implicit term. Carried
  // alongside the strings so that unprojection is lossless.
  bool aspect_implicit = false;
  bool opinion_implicit = false;

  const std::string &field(Role role) const;
  std::string &field(Role role);

  // Compares the four surface strings; the implicitness flags are metadata
  // that cannot be recovered from rendered text.
  friend bool operator==(const SurfaceQuad &a, const SurfaceQuad &b) {
    return a.aspect == b.aspect && a.opinion == b.opinion &&
           a.category == b.category && a.polarity == b.polarity;
  }
};

SurfaceQuad Project(const SentimentQuad &q);

// Inverse of Project. Throws UnknownPolaritySurface when the polarity word is
// not one of the three surfaces.
SentimentQuad Unproject(const SurfaceQuad &s);

// Marks a surface term as implicit when it equals the implicit surface word.
// Used for quads parsed from generated text, where the flags are unknown.
SurfaceQuad WithInferredImplicitness(SurfaceQuad s);

// Canonical matching key: fields whitespace-normalized and lowercased,
// implicit terms encoded distinctly from every string. Two quads are
// Equivalent iff their keys are equal.
std::string CanonicalKey(const SentimentQuad &q);
bool Equivalent(const SentimentQuad &a, const SentimentQuad &b);

// Canonical key of a single element, used for element-level evaluation.
std::string RoleKey(const SentimentQuad &q, Role role);

// Human-readable "(at, ot, ac, sp)" with NULL for implicit terms.
std::string ToString(const SentimentQuad &q);

struct LabeledSentence {
  std::string id;
  std::string text;
  std::vector<SentimentQuad> quads;

  // Sorted, unique categories of this sentence's quads.
  std::vector<std::string> Categories() const;

  friend bool operator==(const LabeledSentence &,
                         const LabeledSentence &) = default;
};

struct Dataset {
  std::string name;
  std::vector<LabeledSentence> sentences;

  // Sorted union of categories over all quads.
  std::vector<std::string> Categories() const;

  // Returns nullptr when absent. Linear scan.
  const LabeledSentence *Find(std::string_view id) const;
};

}  // namespace bvsp

#endif  // BVSP_QUAD_H_
