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

#ifndef BVSP_AGGREGATION_H_
#define BVSP_AGGREGATION_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bvsp/quad.h"

namespace bvsp {

struct TemplatePrediction {
  std::string template_id;
  std::vector<SentimentQuad> quads;
  // Mean per-token negative log-likelihood of the generated sequence, when
  // known. Used by the rank ablation only.
  std::optional<double> mean_nll;
};

struct VoteTally {
  // Canonical quad key -> number of templates predicting it.
  std::map<std::string, std::size_t> counts;
  // Canonical key -> representative quad (smallest by field order among the
  // equivalent predictions, so the choice is order-independent).
  std::map<std::string, SentimentQuad> representatives;
  std::size_t k = 0;
  std::size_t tau = 0;
};

// Counts template membership per quad. Each template contributes a set:
// equivalent quads within one template count once.
VoteTally Tally(std::span<const TemplatePrediction> predictions, std::size_t tau);

// Quads predicted by at least tau templates, in canonical-key order. Throws
// InvalidTau unless 1 <= tau <= predictions.size().
std::vector<SentimentQuad> Vote(std::span<const TemplatePrediction> predictions,
                                std::size_t tau);

// ceil(k / 2). Throws InvalidArgument for k == 0.
std::size_t DefaultTau(std::size_t k);

enum class AggregationStrategy { kVote, kRank, kRandom };

const char *AggregationStrategyName(AggregationStrategy s);
// Accepts "vote", "rank", "rand".
AggregationStrategy ParseAggregationStrategy(std::string_view name);

// kVote is Vote(). kRank returns the single prediction with the lowest
// mean_nll (missing counts as +inf; ties: smaller template id). kRandom
// returns one prediction chosen with `seed`. Single-template outputs are
// deduplicated and sorted like Vote().
std::vector<SentimentQuad> Aggregate(
    std::span<const TemplatePrediction> predictions, AggregationStrategy strategy,
    std::size_t tau, std::uint64_t seed = 0);

}  // namespace bvsp

#endif  // BVSP_AGGREGATION_H_
