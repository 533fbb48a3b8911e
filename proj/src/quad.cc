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

#include "bvsp/quad.h"

#include <algorithm>
#include <set>

#include "bvsp/error.h"
#include "bvsp/text.h"

namespace bvsp {

const char *RoleCode(Role role) {
  switch (role) {
    case Role::kAspect: return "AT";
    case Role::kOpinion: return "OT";
    case Role::kCategory: return "AC";
    case Role::kPolarity: return "SP";
  }
  return "??";
}

const char *RoleName(Role role) {
  switch (role) {
    case Role::kAspect: return "aspect_term";
    case Role::kOpinion: return "opinion_term";
    case Role::kCategory: return "aspect_category";
    case Role::kPolarity: return "sentiment_polarity";
  }
  return "unknown";
}

std::optional<Role> RoleFromCode(std::string_view code) {
  for (Role r : kAllRoles) {
    if (code == RoleCode(r)) return r;
  }
  return std::nullopt;
}

const char *PolaritySurface(Polarity p) {
  switch (p) {
    case Polarity::kPositive: return "great";
    case Polarity::kNeutral: return "ok";
    case Polarity::kNegative: return "bad";
  }
  return "";
}

std::optional<Polarity> PolarityFromSurface(std::string_view surface) {
  if (surface == "great") return Polarity::kPositive;
  if (surface == "ok") return Polarity::kNeutral;
  if (surface == "bad") return Polarity::kNegative;
  return std::nullopt;
}

const char *PolarityLabel(Polarity p) {
  switch (p) {
    case Polarity::kPositive: return "positive";
    case Polarity::kNeutral: return "neutral";
    case Polarity::kNegative: return "negative";
  }
  return "";
}

std::optional<Polarity> PolarityFromLabel(std::string_view label) {
  const std::string l = AsciiLower(Trim(label));
  if (l == "positive" || l == "pos") return Polarity::kPositive;
  if (l == "neutral" || l == "neu") return Polarity::kNeutral;
  if (l == "negative" || l == "neg") return Polarity::kNegative;
  return std::nullopt;
}

Term Term::Explicit(std::string text) {
  if (text.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "explicit term must be non-empty");
  }
  return Term(std::move(text));
}

void SentimentQuad::Validate() const {
  if (category.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "aspect category is empty");
  }
}

const std::string &SurfaceQuad::field(Role role) const {
  switch (role) {
    case Role::kAspect: return aspect;
    case Role::kOpinion: return opinion;
    case Role::kCategory: return category;
    case Role::kPolarity: return polarity;
  }
  return aspect;
}

std::string &SurfaceQuad::field(Role role) {
  return const_cast<std::string &>(std::as_const(*this).field(role));
}

SurfaceQuad Project(const SentimentQuad &q) {
  SurfaceQuad s;
  s.aspect_implicit = q.aspect.implicit();
  s.opinion_implicit = q.opinion.implicit();
  s.aspect = s.aspect_implicit ? std::string(kImplicitSurface) : q.aspect.text();
  s.opinion =
      s.opinion_implicit ? std::string(kImplicitSurface) : q.opinion.text();
  s.category = q.category;
  s.polarity = PolaritySurface(q.polarity);
  return s;
}

SentimentQuad Unproject(const SurfaceQuad &s) {
  const auto polarity = PolarityFromSurface(s.polarity);
  if (!polarity) {
    throw Error(ErrorCode::kUnknownPolaritySurface,
                "'" + s.polarity + "' is not one of great/ok/bad");
  }
  SentimentQuad q;
  q.aspect = s.aspect_implicit ? Term::Implicit() : Term::Explicit(s.aspect);
  q.opinion = s.opinion_implicit ? Term::Implicit() : Term::Explicit(s.opinion);
  q.category = s.category;
  q.polarity = *polarity;
  return q;
}

SurfaceQuad WithInferredImplicitness(SurfaceQuad s) {
  s.aspect_implicit = s.aspect == kImplicitSurface;
  s.opinion_implicit = s.opinion == kImplicitSurface;
  return s;
}

namespace {

std::string TermKey(const Term &t) {
  // Explicit keys always start with '=', so implicit never collides.
  if (t.implicit()) return "\x01";
  return "=" + AsciiLower(NormalizeWhitespace(t.text()));
}

}  // namespace

std::string CanonicalKey(const SentimentQuad &q) {
  std::string key = TermKey(q.aspect);
  key += '\x1f';
  key += TermKey(q.opinion);
  key += '\x1f';
  key += AsciiLower(NormalizeWhitespace(q.category));
  key += '\x1f';
  key += PolarityLabel(q.polarity);
  return key;
}

bool Equivalent(const SentimentQuad &a, const SentimentQuad &b) {
  return CanonicalKey(a) == CanonicalKey(b);
}

std::string RoleKey(const SentimentQuad &q, Role role) {
  switch (role) {
    case Role::kAspect: return TermKey(q.aspect);
    case Role::kOpinion: return TermKey(q.opinion);
    case Role::kCategory: return AsciiLower(NormalizeWhitespace(q.category));
    case Role::kPolarity: return PolarityLabel(q.polarity);
  }
  return {};
}

std::string ToString(const SentimentQuad &q) {
  auto term = [](const Term &t) {
    return t.implicit() ? std::string("NULL") : t.text();
  };
  return "(" + term(q.aspect) + ", " + term(q.opinion) + ", " + q.category +
         ", " + PolarityLabel(q.polarity) + ")";
}

std::vector<std::string> LabeledSentence::Categories() const {
  std::set<std::string> cats;
  for (const auto &q : quads) cats.insert(q.category);
  return {cats.begin(), cats.end()};
}

std::vector<std::string> Dataset::Categories() const {
  std::set<std::string> cats;
  for (const auto &s : sentences) {
    for (const auto &q : s.quads) cats.insert(q.category);
  }
  return {cats.begin(), cats.end()};
}

const LabeledSentence *Dataset::Find(std::string_view id) const {
  auto it = std::find_if(sentences.begin(), sentences.end(),
                         [&](const LabeledSentence &s) { return s.id == id; });
  return it == sentences.end() ? nullptr : &*it;
}

}  // namespace bvsp
