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

#include "bvsp/aggregation.h"

#include <limits>
#include <set>

#include "bvsp/error.h"
#include "bvsp/rng.h"

namespace bvsp {

VoteTally Tally(std::span<const TemplatePrediction> predictions,
                std::size_t tau) {
  VoteTally tally;
  tally.k = predictions.size();
  tally.tau = tau;
  for (const auto &pred : predictions) {
    std::set<std::string> seen;
    for (const auto &q : pred.quads) {
      std::string key = CanonicalKey(q);
      auto [rep, inserted] = tally.representatives.try_emplace(key, q);
      if (!inserted && q < rep->second) rep->second = q;
      if (seen.insert(key).second) ++tally.counts[key];
    }
  }
  return tally;
}

std::vector<SentimentQuad> Vote(std::span<const TemplatePrediction> predictions,
                                std::size_t tau) {
  if (tau < 1 || tau > predictions.size()) {
    throw Error(ErrorCode::kInvalidTau,
                "tau=" + std::to_string(tau) + " outside [1, " +
                    std::to_string(predictions.size()) + "]");
  }
  const VoteTally tally = Tally(predictions, tau);
  std::vector<SentimentQuad> out;
  for (const auto &[key, count] : tally.counts) {
    if (count >= tau) out.push_back(tally.representatives.at(key));
  }
  return out;
}

std::size_t DefaultTau(std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  return (k + 1) / 2;
}

const char *AggregationStrategyName(AggregationStrategy s) {
  switch (s) {
    case AggregationStrategy::kVote: return "vote";
    case AggregationStrategy::kRank: return "rank";
    case AggregationStrategy::kRandom: return "rand";
  }
  return "unknown";
}

AggregationStrategy ParseAggregationStrategy(std::string_view name) {
  for (auto s : {AggregationStrategy::kVote, AggregationStrategy::kRank,
                 AggregationStrategy::kRandom}) {
    if (name == AggregationStrategyName(s)) return s;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown aggregation strategy '" + std::string(name) + "'");
}

std::vector<SentimentQuad> Aggregate(
    std::span<const TemplatePrediction> predictions, AggregationStrategy strategy,
    std::size_t tau, std::uint64_t seed) {
  if (strategy == AggregationStrategy::kVote) return Vote(predictions, tau);
  if (predictions.empty()) return {};
  std::size_t pick = 0;
  if (strategy == AggregationStrategy::kRank) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < predictions.size(); ++i) {
      const double a = predictions[i].mean_nll.value_or(kInf);
      const double b = predictions[pick].mean_nll.value_or(kInf);
      if (a < b || (a == b && predictions[i].template_id <
                                  predictions[pick].template_id)) {
        pick = i;
      }
    }
  } else {
    Rng rng(seed);
    pick = rng.Below(predictions.size());
  }
  return Vote(predictions.subspan(pick, 1), 1);
}

}  // namespace bvsp
