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

#include "bvsp/scoring.h"

#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "bvsp/error.h"
#include "bvsp/parallel.h"
#include "test_support.h"

namespace bvsp {
namespace {

constexpr double kTwoLn2 = 1.3862943611198906;

TargetSequence ParaphraseTarget() {
  const SurfaceQuad q{"room", "clean", "room_overall", "great"};
  return Render(std::span(&q, 1), FindTemplate("paraphrase"));
}

ScoredTarget Manual(std::vector<double> realized) {
  ScoredTarget st;
  st.target_text.clear();
  for (std::size_t i = 0; i < realized.size(); ++i) {
    const std::string tok = "w" + std::to_string(i);
    if (!st.target_text.empty()) st.target_text += ' ';
    const std::size_t start = st.target_text.size();
    st.target_text += tok;
    st.tokens.push_back({tok, start, st.target_text.size()});
    TokenDistribution d;
    d.support.emplace_back(tok, realized[i]);
    d.other_mass = 1.0 - realized[i];
    st.distributions.push_back(d);
  }
  return st;
}

TEST(ScoringTest, CrossEntropyOfHalvesIsTwoLn2) {
  EXPECT_NEAR(CrossEntropy(Manual({0.5, 0.5})), kTwoLn2, 1e-15);
  EXPECT_NEAR(CrossEntropy(Manual({0.5, 0.5}), LossReduction::kMean), kTwoLn2 / 2, 1e-15);
}

TEST(ScoringTest, CrossEntropyOfCertaintyIsZero) {
  EXPECT_EQ(CrossEntropy(Manual({1.0, 1.0, 1.0})), 0.0);
}

TEST(ScoringTest, CrossEntropyUsesOtherMassAndFloor) {
  ScoredTarget st = Manual({0.25});
  st.distributions[0].support = {{"zzz", 0.75}};
  st.distributions[0].other_mass = 0.25;
  EXPECT_NEAR(CrossEntropy(st), -std::log(0.25), 1e-15);
  st.distributions[0].support = {{"zzz", 1.0}};
  st.distributions[0].other_mass = 0.0;
  EXPECT_NEAR(CrossEntropy(st), -std::log(kProbabilityFloor), 1e-9);
}

TEST(ScoringTest, CrossEntropyMatchesDirectSummation) {
  Rng rng(5);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 1 + rng.Below(30);
    std::vector<double> p;
    for (std::size_t i = 0; i < n; ++i) p.push_back(rng.Uniform() < 0.05 ? 0.0 : rng.Uniform());
    long double oracle = 0.0L;
    for (double x : p) oracle -= std::log(static_cast<long double>(std::max(x, 1e-12)));
    EXPECT_NEAR(CrossEntropy(Manual(p)), static_cast<double>(oracle), 1e-12);
    EXPECT_GE(CrossEntropy(Manual(p)), 0.0);
  }
}

TEST(ScoringTest, TokenizerSplitsPunctuationKeepsMarkers) {
  const auto toks = TokenizeTarget("[AT] room's [SSEP] (food, great)");
  std::vector<std::string> texts;
  for (const auto &t : toks) texts.push_back(t.text);
  EXPECT_EQ(texts, (std::vector<std::string>{"[AT]", "room", "'", "s", "[SSEP]", "(",
                                             "food", ",", "great", ")"}));
  for (const auto &t : toks) {
    EXPECT_EQ(std::string("[AT] room's [SSEP] (food, great)").substr(t.start, t.end - t.start),
              t.text);
  }
}

TEST(ScoringTest, ReferenceDistributionsAreNormalized) {
  ReferenceScorer scorer({.seed = 3});
  Rng rng(9);
  for (const auto &t : ListTemplates()) {
    const auto qs = testing::ProjectAll(testing::RandomQuads(rng));
    const TargetSequence target = Render(qs, t);
    const ScoredTarget st = scorer.Score("the room was clean and cheap", target, t.id);
    ASSERT_EQ(st.tokens.size(), st.distributions.size());
    ASSERT_GE(st.tokens.size(), 1u);
    for (const auto &d : st.distributions) {
      EXPECT_NEAR(d.Total(), 1.0, 1e-6);
      EXPECT_LE(d.support.size(), 50u);
    }
    EXPECT_NO_THROW(st.Validate());
  }
}

TEST(ScoringTest, ReferenceIsDeterministicAcrossThreads) {
  ReferenceScorer scorer({.seed = 42});
  const TargetSequence target = ParaphraseTarget();
  const ScoredTarget base = scorer.Score("The room is clean .", target, "paraphrase");
  std::vector<ScoredTarget> results(16);
  ParallelFor(results.size(), 4, [&](std::size_t i) {
    results[i] = scorer.Score("The room is clean .", target, "paraphrase");
  });
  for (const auto &r : results) {
    ASSERT_EQ(r.distributions.size(), base.distributions.size());
    for (std::size_t i = 0; i < r.distributions.size(); ++i) {
      EXPECT_EQ(r.distributions[i].support, base.distributions[i].support);
      EXPECT_EQ(r.distributions[i].other_mass, base.distributions[i].other_mass);
    }
  }
}

TEST(ScoringTest, TemplateIdChangesReferenceDistributions) {
  ReferenceScorer scorer({.seed = 1});
  const TargetSequence target = ParaphraseTarget();
  const ScoredTarget a = scorer.Score("The room is clean .", target, "paraphrase");
  const ScoredTarget b = scorer.Score("The room is clean .", target, "gas");
  bool differs = false;
  for (std::size_t i = 0; i < a.distributions.size(); ++i) {
    differs = differs || a.distributions[i].support != b.distributions[i].support;
  }
  EXPECT_TRUE(differs);
}

TEST(ScoringTest, EchoModeIgnoresTemplate) {
  ReferenceScorerConfig cfg;
  cfg.mode = ReferenceScorerConfig::Mode::kEcho;
  ReferenceScorer scorer(cfg);
  const SurfaceQuad q{"room", "clean", "room_overall", "great"};
  const TargetSequence a = Render(std::span(&q, 1), FindTemplate("paraphrase"));
  const TargetSequence b = Render(std::span(&q, 1), FindTemplate("marker_OT_AT_AC_SP"));
  const ScoredTarget sa = scorer.Score("The room is clean .", a, "paraphrase");
  const ScoredTarget sb = scorer.Score("The room is clean .", b, "marker_OT_AT_AC_SP");
  auto dist_of = [](const ScoredTarget &st, const std::string &tok) {
    for (std::size_t i = 0; i < st.tokens.size(); ++i) {
      if (st.tokens[i].text == tok) return st.distributions[i];
    }
    return TokenDistribution{};
  };
  for (const char *tok : {"room", "clean", "room_overall", "great"}) {
    EXPECT_EQ(dist_of(sa, tok).support, dist_of(sb, tok).support) << tok;
    EXPECT_EQ(dist_of(sa, tok).other_mass, dist_of(sb, tok).other_mass) << tok;
    EXPECT_GE(dist_of(sa, tok).Probability(tok), 0.9) << tok;
  }
}

TEST(ScoringTest, ValidateRejectsBadDistributions) {
  TokenDistribution d;
  d.support = {{"a", 0.5}, {"b", 0.6}};
  EXPECT_THROW(d.Validate(), Error);
  d.support = {{"a", 0.5}, {"a", 0.5}};
  EXPECT_THROW(d.Validate(), Error);
  d.support = {{"a", -0.1}, {"b", 1.1}};
  EXPECT_THROW(d.Validate(), Error);
  d.support = {{"a", 0.5}};
  d.other_mass = 0.5;
  EXPECT_NO_THROW(d.Validate());
}

TEST(ScoringTest, ValidateRejectsBadSpans) {
  ScoredTarget st = Manual({0.5, 0.5});
  EXPECT_NO_THROW(st.Validate());
  st.tokens[1].end = st.target_text.size() + 1;
  EXPECT_THROW(st.Validate(), Error);
  st = Manual({0.5, 0.5});
  st.tokens[1].start = 0;
  EXPECT_THROW(st.Validate(), Error);
  st = Manual({0.5, 0.5});
  st.distributions.pop_back();
  EXPECT_THROW(st.Validate(), Error);
  st = Manual({0.5, 0.5});
  st.tokens[0].end = 1;  // leaves "0" uncovered
  EXPECT_THROW(st.Validate(), Error);
}

TEST(ScoringTest, ReferenceGeneratorIsDeterministicAndParseable) {
  ReferenceGeneratorConfig cfg;
  cfg.seed = 4;
  cfg.categories = {"room_overall", "service"};
  ReferenceGenerator gen(cfg);
  LabeledSentence s{"1", "The room is clean .",
                    {{Term::Explicit("room"), Term::Explicit("clean"), "room_overall",
                      Polarity::kPositive}}};
  for (const auto &t : ListTemplates()) {
    const std::string a = gen.Generate(s, t);
    EXPECT_EQ(a, gen.Generate(s, t));
    EXPECT_EQ(Parse(a, t).malformed, 0u) << t.id << ": " << a;
  }
}

}  // namespace
}  // namespace bvsp
