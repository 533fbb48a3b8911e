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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "bvsp/error.h"
#include "bvsp/rng.h"
#include "bvsp/text.h"

namespace bvsp {

double TokenDistribution::Total() const {
  double total = other_mass;
  for (const auto &[key, p] : support) total += p;
  return total;
}

double TokenDistribution::Probability(std::string_view token) const {
  for (const auto &[key, p] : support) {
    if (key == token) return p;
  }
  return other_mass;
}

void TokenDistribution::Validate(double tolerance) const {
  auto bad = [](double p) { return !std::isfinite(p) || p < 0.0; };
  if (bad(other_mass)) {
    throw Error(ErrorCode::kProtocolViolation, "invalid other_mass");
  }
  std::unordered_set<std::string_view> keys;
  for (const auto &[key, p] : support) {
    if (bad(p)) {
      throw Error(ErrorCode::kProtocolViolation,
                  "invalid probability for token '" + key + "'");
    }
    if (!keys.insert(key).second) {
      throw Error(ErrorCode::kProtocolViolation,
                  "duplicate support key '" + key + "'");
    }
  }
  const double total = Total();
  if (std::abs(total - 1.0) > tolerance) {
    throw Error(ErrorCode::kProtocolViolation,
                "distribution mass " + std::to_string(total) +
                    " is not normalized");
  }
}

void ScoredTarget::Validate(double tolerance) const {
  if (tokens.empty()) {
    throw Error(ErrorCode::kProtocolViolation, "no tokens");
  }
  if (tokens.size() != distributions.size()) {
    throw Error(ErrorCode::kProtocolViolation,
                std::to_string(tokens.size()) + " tokens but " +
                    std::to_string(distributions.size()) + " distributions");
  }
  std::size_t cursor = 0;
  for (const Token &tok : tokens) {
    if (tok.start > tok.end || tok.end > target_text.size() ||
        tok.start < cursor) {
      throw Error(ErrorCode::kProtocolViolation,
                  "token '" + tok.text + "' has an invalid span [" +
                      std::to_string(tok.start) + ", " +
                      std::to_string(tok.end) + ")");
    }
    for (std::size_t i = cursor; i < tok.start; ++i) {
      if (!IsSpace(target_text[i])) {
        throw Error(ErrorCode::kProtocolViolation,
                    "byte " + std::to_string(i) + " of the target is not "
                    "covered by any token");
      }
    }
    cursor = tok.end;
  }
  for (std::size_t i = cursor; i < target_text.size(); ++i) {
    if (!IsSpace(target_text[i])) {
      throw Error(ErrorCode::kProtocolViolation,
                  "trailing target text is not covered by any token");
    }
  }
  for (const auto &d : distributions) d.Validate(tolerance);
}

double CrossEntropy(const ScoredTarget &st, LossReduction reduction) {
  double loss = 0.0;
  const std::size_t n = std::min(st.tokens.size(), st.distributions.size());
  for (std::size_t t = 0; t < n; ++t) {
    const double p = st.distributions[t].Probability(st.tokens[t].text);
    loss -= std::log(std::max(p, kProbabilityFloor));
  }
  if (reduction == LossReduction::kMean && n > 0) {
    loss /= static_cast<double>(n);
  }
  return loss;
}

namespace {

constexpr std::string_view kMarkerTokens[] = {"[AT]", "[OT]", "[AC]", "[SP]",
                                              "[SSEP]"};

bool IsPunct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u) && c != '_';
}

}  // namespace

std::vector<Token> TokenizeTarget(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (IsSpace(text[i])) {
      ++i;
      continue;
    }
    std::size_t len = 0;
    if (text[i] == '[') {
      for (std::string_view m : kMarkerTokens) {
        if (text.substr(i, m.size()) == m) {
          len = m.size();
          break;
        }
      }
    }
    if (len == 0 && IsPunct(text[i])) len = 1;
    if (len == 0) {
      while (i + len < text.size() && !IsSpace(text[i + len]) &&
             !IsPunct(text[i + len])) {
        ++len;
      }
    }
    tokens.push_back({std::string(text.substr(i, len)), i, i + len});
    i += len;
  }
  return tokens;
}

namespace {

const std::vector<std::string> &FixedVocabulary() {
  static const std::vector<std::string> vocab = {
      "[AT]", "[OT]", "[AC]", "[SP]", "[SSEP]", "great", "ok",
      "bad",  "it",   "is",   "because", "(", ")", ","};
  return vocab;
}

std::vector<std::string> CandidateSet(std::string_view input,
                                      const std::vector<Token> *target_tokens,
                                      const std::string *extra) {
  std::set<std::string> set(FixedVocabulary().begin(), FixedVocabulary().end());
  for (const Token &t : TokenizeTarget(input)) set.insert(t.text);
  if (target_tokens != nullptr) {
    for (const Token &t : *target_tokens) set.insert(t.text);
  }
  if (extra != nullptr) set.insert(*extra);
  return {set.begin(), set.end()};
}

// Keeps the top-m entries by (probability desc, key asc) and folds the rest
// into other_mass.
TokenDistribution Truncate(const std::vector<std::string> &keys,
                           const std::vector<double> &probs, std::size_t top_m) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (probs[a] != probs[b]) return probs[a] > probs[b];
    return keys[a] < keys[b];
  });
  TokenDistribution d;
  const std::size_t keep = std::min(top_m, order.size());
  d.support.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r) {
    d.support.emplace_back(keys[order[r]], probs[order[r]]);
  }
  for (std::size_t r = keep; r < order.size(); ++r) d.other_mass += probs[order[r]];
  return d;
}

// Add-alpha character trigram counts over a growing context.
class TrigramCounts {
 public:
  explicit TrigramCounts(double alpha) : alpha_(alpha), context_(65536, 0) {}

  void Feed(std::string_view s) {
    for (char ch : s) {
      const auto c = static_cast<unsigned char>(ch);
      ++trigram_[Key(h1_, h2_, c)];
      ++context_[(h1_ << 8) | h2_];
      h1_ = h2_;
      h2_ = c;
    }
  }

  // Mean per-character log-probability of `s` continuing the context.
  double MeanLogProb(std::string_view s) const {
    if (s.empty()) return 0.0;
    unsigned a = h1_;
    unsigned b = h2_;
    double lp = 0.0;
    for (char ch : s) {
      const auto c = static_cast<unsigned char>(ch);
      const auto it = trigram_.find(Key(a, b, c));
      const double num = (it == trigram_.end() ? 0.0 : it->second) + alpha_;
      const double den = context_[(a << 8) | b] + alpha_ * 256.0;
      lp += std::log(num / den);
      a = b;
      b = c;
    }
    return lp / static_cast<double>(s.size());
  }

 private:
  static std::uint32_t Key(unsigned a, unsigned b, unsigned c) {
    return (a << 16) | (b << 8) | c;
  }

  double alpha_;
  std::unordered_map<std::uint32_t, int> trigram_;
  std::vector<int> context_;
  unsigned h1_ = 0;
  unsigned h2_ = 0;
};

// Symmetric offset in [-scale, scale) derived from a hash.
double HashOffset(std::uint64_t h, double scale) {
  return scale * (2.0 * HashToUnit(Mix64(h)) - 1.0);
}

}  // namespace

ReferenceScorer::ReferenceScorer(ReferenceScorerConfig config)
    : config_(std::move(config)) {
  if (config_.top_m == 0) {
    throw Error(ErrorCode::kInvalidArgument, "top_m must be positive");
  }
  if (config_.echo_noise < 0.0 || config_.echo_noise > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "echo_noise must be in [0, 1]");
  }
}

std::string ReferenceScorer::Describe() const {
  return std::string("reference(mode=") +
         (config_.mode == ReferenceScorerConfig::Mode::kEcho ? "echo"
                                                              : "trigram") +
         ",seed=" + std::to_string(config_.seed) +
         ",top_m=" + std::to_string(config_.top_m) + ")";
}

ScoredTarget ReferenceScorer::Score(std::string_view input_text,
                                    const TargetSequence &target,
                                    std::string_view template_id) const {
  ScoredTarget st = config_.mode == ReferenceScorerConfig::Mode::kEcho
                        ? ScoreEcho(input_text, target, template_id)
                        : ScoreTrigram(input_text, target, template_id);
  if (st.tokens.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "target has no tokens");
  }
  return st;
}

ScoredTarget ReferenceScorer::ScoreTrigram(std::string_view input_text,
                                           const TargetSequence &target,
                                           std::string_view template_id) const {
  ScoredTarget st;
  st.target_text = target.text;
  st.template_id = std::string(template_id);
  st.tokens = TokenizeTarget(target.text);

  const std::vector<std::string> candidates =
      CandidateSet(input_text, &st.tokens, nullptr);
  const std::uint64_t template_hash = Fnv1a64(template_id);
  std::vector<double> static_offset(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const std::uint64_t token_hash = Fnv1a64(candidates[i]);
    static_offset[i] =
        HashOffset(template_hash ^ token_hash, config_.template_bias) +
        HashOffset(config_.seed ^ Mix64(token_hash), config_.token_noise);
  }

  TrigramCounts counts(config_.alpha);
  counts.Feed(input_text);
  counts.Feed("\n");
  std::size_t fed = 0;
  std::vector<double> logits(candidates.size());
  std::vector<double> probs(candidates.size());
  for (const Token &tok : st.tokens) {
    counts.Feed(std::string_view(target.text).substr(fed, tok.start - fed));
    fed = tok.start;
    double max_logit = -INFINITY;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      logits[i] = config_.sharpness * counts.MeanLogProb(candidates[i]) +
                  static_offset[i];
      max_logit = std::max(max_logit, logits[i]);
    }
    double z = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      probs[i] = std::exp(logits[i] - max_logit);
      z += probs[i];
    }
    for (double &p : probs) p /= z;
    st.distributions.push_back(Truncate(candidates, probs, config_.top_m));
  }
  return st;
}

ScoredTarget ReferenceScorer::ScoreEcho(std::string_view input_text,
                                        const TargetSequence &target,
                                        std::string_view template_id) const {
  ScoredTarget st;
  st.target_text = target.text;
  st.template_id = std::string(template_id);
  st.tokens = TokenizeTarget(target.text);
  const double w = config_.echo_noise;
  for (const Token &tok : st.tokens) {
    const std::vector<std::string> candidates =
        CandidateSet(input_text, nullptr, &tok.text);
    const double uniform = w / static_cast<double>(candidates.size());
    std::vector<double> probs(candidates.size(), uniform);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (candidates[i] == tok.text) probs[i] += 1.0 - w;
    }
    st.distributions.push_back(Truncate(candidates, probs, config_.top_m));
  }
  return st;
}

ReferenceGenerator::ReferenceGenerator(ReferenceGeneratorConfig config)
    : config_(std::move(config)) {}

std::string ReferenceGenerator::Describe() const {
  return "reference-generator(seed=" + std::to_string(config_.seed) + ")";
}

std::string ReferenceGenerator::Generate(const LabeledSentence &sentence,
                                         const Template &t) const {
  const std::uint64_t template_hash = Fnv1a64(t.id);
  Rng rng(Mix64(config_.seed) ^ Mix64(Fnv1a64(sentence.id) + 1) ^
          template_hash);
  // Per-template difficulty in [0.5, 1.5).
  const double factor = 0.5 + HashToUnit(Mix64(template_hash ^ 0x5bd1e995ULL));

  std::vector<SentimentQuad> out;
  for (const SentimentQuad &gold : sentence.quads) {
    if (rng.Uniform() < config_.drop_rate * factor) continue;
    SentimentQuad q = gold;
    if (rng.Uniform() < config_.polarity_flip_rate * factor) {
      q.polarity = static_cast<Polarity>((static_cast<int>(q.polarity) + 1 +
                                          static_cast<int>(rng.Below(2))) % 3);
    }
    if (!config_.categories.empty() &&
        rng.Uniform() < config_.category_swap_rate * factor) {
      q.category = config_.categories[rng.Below(config_.categories.size())];
    }
    if (rng.Uniform() < config_.implicit_opinion_rate * factor) {
      q.opinion = Term::Implicit();
    }
    out.push_back(std::move(q));
  }
  if (!sentence.quads.empty() &&
      rng.Uniform() < config_.spurious_rate * factor) {
    SentimentQuad extra = sentence.quads[rng.Below(sentence.quads.size())];
    extra.polarity = static_cast<Polarity>(
        (static_cast<int>(extra.polarity) + 1) % 3);
    out.push_back(std::move(extra));
  }

  std::vector<SurfaceQuad> surface;
  for (const auto &q : out) {
    SurfaceQuad s = Project(q);
    if (IsRenderable(s, t)) surface.push_back(std::move(s));
  }
  if (surface.empty()) return "";
  return Render(surface, t).text;
}

}  // namespace bvsp
