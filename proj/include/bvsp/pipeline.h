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

// select -> predict -> aggregate -> evaluate for one support/query split.

#ifndef BVSP_PIPELINE_H_
#define BVSP_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bvsp/aggregation.h"
#include "bvsp/evaluation.h"
#include "bvsp/quad.h"
#include "bvsp/scoring.h"
#include "bvsp/selection.h"
#include "bvsp/template.h"

namespace bvsp {

struct PipelineConfig {
  std::size_t k_templates = 3;
  // Defaults to DefaultTau(k_templates).
  std::optional<std::size_t> tau;
  SelectionStrategy selection = SelectionStrategy::kJsMin;
  AggregationStrategy aggregation = AggregationStrategy::kVote;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  std::size_t EffectiveTau() const;
};

struct SelectionOutcome {
  CorrelationResult correlation;
  std::vector<std::string> selected;
};

// Correlation over `templates` on the support set, then the strategy's k ids.
SelectionOutcome SelectForSupport(std::span<const LabeledSentence> support,
                                  std::span<const Template> templates,
                                  const Scorer &scorer, std::size_t k,
                                  SelectionStrategy strategy, std::uint64_t seed,
                                  std::size_t jobs);

struct SentencePrediction {
  std::string id;
  std::vector<TemplatePrediction> per_template;
  std::vector<SentimentQuad> quads;
  // Generated clauses that did not parse.
  std::size_t malformed = 0;
};

// Generates with every template, parses, and aggregates per sentence.
// `scorer` is only used by the rank strategy, which needs the mean token NLL
// of each template's (re-rendered) output; it may be null otherwise.
std::vector<SentencePrediction> Predict(
    std::span<const LabeledSentence> query, std::span<const Template> templates,
    const Generator &generator, const Scorer *scorer,
    AggregationStrategy aggregation, std::size_t tau, std::uint64_t seed,
    std::size_t jobs);

struct EpisodeResult {
  SelectionOutcome selection;
  std::vector<SentencePrediction> predictions;
  EvalReport report;
};

// Selection always considers the full template inventory.
EpisodeResult RunEpisode(std::span<const LabeledSentence> support,
                         std::span<const LabeledSentence> query,
                         const Scorer &scorer, const Generator &generator,
                         const PipelineConfig &config);

// Looks the ids up with FindTemplate.
std::vector<Template> TemplatesById(std::span<const std::string> ids);

std::vector<SentenceQuads> FinalQuads(std::span<const SentencePrediction> preds);

}  // namespace bvsp

#endif  // BVSP_PIPELINE_H_
