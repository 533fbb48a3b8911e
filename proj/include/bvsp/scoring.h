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

// Teacher-forced scoring of target sequences.
//
// A Scorer returns, for every token of a target sequence, the model's
// next-token distribution given the input and the gold prefix. Distributions
// are sparse: the top-m entries plus one aggregate OTHER bucket holding the
// remaining mass.
//
// Two implementations exist: ReferenceScorer (deterministic, no model; see
// below) and RemoteClient (remote.h), which relays a language-model sidecar
// over HTTP.

#ifndef BVSP_SCORING_H_
#define BVSP_SCORING_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bvsp/quad.h"
#include "bvsp/template.h"

namespace bvsp {

// Floor applied to probabilities inside logarithms.
inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr double kDefaultMassTolerance = 1e-6;

struct TokenDistribution {
  std::vector<std::pair<std::string, double>> support;
  double other_mass = 0.0;

  // Support mass plus other_mass.
  double Total() const;

  // Probability of `token`: its support entry, or other_mass when absent.
  double Probability(std::string_view token) const;

  // Throws ProtocolViolation on negative or non-finite probabilities,
  // duplicate keys, or a total outside [1 - tolerance, 1 + tolerance].
  void Validate(double tolerance = kDefaultMassTolerance) const;
};

struct Token {
  std::string text;
  // Byte offsets into the target text, half-open.
  std::size_t start = 0;
  std::size_t end = 0;
};

struct ScoredTarget {
  std::string target_text;
  std::vector<Token> tokens;
  std::vector<TokenDistribution> distributions;
  std::string template_id;
  std::optional<std::string> prefix_id;

  // Checks the structural invariants: equal, non-zero token and
  // distribution counts; spans in bounds, ordered and non-overlapping; every
  // byte not covered by a span is whitespace; every distribution valid.
  // Throws ProtocolViolation.
  void Validate(double tolerance = kDefaultMassTolerance) const;
};

enum class LossReduction { kSum, kMean };

// -sum_t log max(p(y_t), floor), in nats, where y_t is the token text at
// position t. kMean divides by the number of positions.
double CrossEntropy(const ScoredTarget &st,
                    LossReduction reduction = LossReduction::kSum);

// Whitespace tokens with ASCII punctuation split off ('_' counts as a word
// character). The markers [AT] [OT] [AC] [SP] and [SSEP] are single tokens.
std::vector<Token> TokenizeTarget(std::string_view text);

class Scorer {
 public:
  virtual ~Scorer() = default;

  // Implementations must be safe to call concurrently.
  virtual ScoredTarget Score(std::string_view input_text,
                             const TargetSequence &target,
                             std::string_view template_id) const = 0;

  virtual std::string Describe() const = 0;
};

// Produces a target-sequence string for a sentence under a template.
// The sentence carries gold quads for simulation backends; real generators
// only look at the text.
class Generator {
 public:
  virtual ~Generator() = default;

  virtual std::string Generate(const LabeledSentence &sentence,
                               const Template &t) const = 0;

  virtual std::string Describe() const = 0;
};

// Deterministic stand-in for a language model.
//
// Trigram mode: candidates are the tokens of the input, the target and a
// fixed vocabulary of template words. The logit of a candidate is its mean
// per-character log-probability under an add-alpha character trigram model
// estimated on the input text plus the gold target prefix, scaled by
// `sharpness`, plus a per-template bias and a seeded per-token offset (both
// derived from FNV hashes). The distribution is the softmax, truncated to the
// top-m entries plus OTHER.
//
// Echo mode: the distribution at each position is a point mass on the
// realized token mixed with weight `echo_noise` of uniform mass over a
// template-independent candidate set. Aligned element tokens therefore get
// identical distributions under every template.
struct ReferenceScorerConfig {
  enum class Mode { kTrigram, kEcho };

  Mode mode = Mode::kTrigram;
  std::uint64_t seed = 0;
  std::size_t top_m = 50;
  double alpha = 0.5;
  double sharpness = 4.0;
  double template_bias = 0.5;
  double token_noise = 0.25;
  double echo_noise = 0.1;
};

class ReferenceScorer : public Scorer {
 public:
  explicit ReferenceScorer(ReferenceScorerConfig config = {});

  ScoredTarget Score(std::string_view input_text, const TargetSequence &target,
                     std::string_view template_id) const override;

  std::string Describe() const override;

  const ReferenceScorerConfig &config() const { return config_; }

 private:
  ScoredTarget ScoreTrigram(std::string_view input_text,
                            const TargetSequence &target,
                            std::string_view template_id) const;
  ScoredTarget ScoreEcho(std::string_view input_text,
                         const TargetSequence &target,
                         std::string_view template_id) const;

  ReferenceScorerConfig config_;
};

// Simulated generator for exercising the pipeline without a model: it
// perturbs the gold quads (drops, polarity flips, category swaps, implicit
// opinions, spurious extras) with seeded, template-dependent rates and
// renders the result with the template. Unrenderable quads are skipped; an
// empty result renders as "".
struct ReferenceGeneratorConfig {
  std::uint64_t seed = 0;
  double drop_rate = 0.15;
  double polarity_flip_rate = 0.10;
  double category_swap_rate = 0.10;
  double implicit_opinion_rate = 0.05;
  double spurious_rate = 0.10;
  // Candidate categories for swaps, usually the dataset's categories.
  std::vector<std::string> categories;
};

class ReferenceGenerator : public Generator {
 public:
  explicit ReferenceGenerator(ReferenceGeneratorConfig config);

  std::string Generate(const LabeledSentence &sentence,
                       const Template &t) const override;

  std::string Describe() const override;

 private:
  ReferenceGeneratorConfig config_;
};

}  // namespace bvsp

#endif  // BVSP_SCORING_H_
