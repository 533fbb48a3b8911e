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

// k-shot episodes: a per-category support set drawn from the pool, with the
// remainder as the query set, and multi-run averaging.

#ifndef BVSP_FEWSHOT_H_
#define BVSP_FEWSHOT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bvsp/evaluation.h"
#include "bvsp/quad.h"

namespace bvsp {

struct Episode {
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  // Both in pool order.
  std::vector<std::string> support_ids;
  std::vector<std::string> query_ids;

  friend bool operator==(const Episode &, const Episode &) = default;
};

// Each category keeps a candidate list (the instances containing it, shuffled
// with a seed derived from `seed` and the category name). Sampling runs in
// rounds r = 1..k: in round r, categories are visited in ascending order and
// each one takes its next unselected candidates until it has r supporting
// instances or runs out. A selected instance counts for every category it
// contains. Because round r does not depend on k, the support for k is a
// superset of the support for k - 1 under the same seed.
//
// Throws EmptyPool for an empty pool, InvalidArgument for k == 0 and
// DuplicateId when pool ids repeat.
Episode SampleEpisode(const Dataset &pool, std::size_t k, std::uint64_t seed);

// Episodes for seeds seed0 .. seed0 + runs - 1.
std::vector<Episode> SampleEpisodes(const Dataset &pool, std::size_t k,
                                    std::size_t runs, std::uint64_t seed0);

struct EpisodeSplit {
  std::vector<LabeledSentence> support;
  std::vector<LabeledSentence> query;
};

// Looks the episode's ids up in `pool`. Throws UnknownId.
EpisodeSplit Materialize(const Dataset &pool, const Episode &episode);

struct Moments {
  double mean = 0.0;
  // Sample standard deviation; 0 for a single run.
  double stddev = 0.0;
};

Moments ComputeMoments(std::span<const double> values);

// Named scalar metrics of a report: "quad.precision", "quad.recall",
// "quad.f1", "<role>.f1" for each element role, "explicit.f1",
// "implicit.f1".
std::map<std::string, double> FlattenMetrics(const EvalReport &report);

struct ProtocolReport {
  std::vector<Episode> episodes;
  std::vector<EvalReport> runs;
  // Per metric name of FlattenMetrics.
  std::map<std::string, Moments> summary;
};

using EpisodePipeline =
    std::function<EvalReport(const Episode &, const EpisodeSplit &)>;

ProtocolReport Summarize(std::vector<Episode> episodes,
                         std::vector<EvalReport> runs);

// Runs `pipeline` on each episode in order; the first error aborts the batch.
// Throws InvalidArgument when there are no episodes.
ProtocolReport RunProtocol(const Dataset &pool, std::span<const Episode> episodes,
                           const EpisodePipeline &pipeline);

}  // namespace bvsp

#endif  // BVSP_FEWSHOT_H_
