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

#include "bvsp/pipeline.h"

#include "bvsp/error.h"
#include "bvsp/parallel.h"
#include "bvsp/text.h"

namespace bvsp {

std::size_t PipelineConfig::EffectiveTau() const {
  return tau ? *tau : DefaultTau(k_templates);
}

SelectionOutcome SelectForSupport(std::span<const LabeledSentence> support,
                                  std::span<const Template> templates,
                                  const Scorer &scorer, std::size_t k,
                                  SelectionStrategy strategy, std::uint64_t seed,
                                  std::size_t jobs) {
  SelectionOutcome out;
  out.correlation = ComputeCorrelationMatrix(support, templates, scorer, {jobs});
  out.selected = SelectTemplates(out.correlation, k, strategy, seed);
  return out;
}

namespace {

TemplatePrediction PredictOne(const LabeledSentence &sentence, const Template &t,
                              const Generator &generator, const Scorer *scorer,
                              std::size_t *malformed) {
  const ParseResult parsed = Parse(generator.Generate(sentence, t), t);
  *malformed = parsed.malformed;
  TemplatePrediction pred;
  pred.template_id = t.id;
  for (const auto &s : parsed.quads) pred.quads.push_back(Unproject(s));
  if (scorer != nullptr && !parsed.quads.empty()) {
    const TargetSequence target = Render(parsed.quads, t);
    pred.mean_nll =
        CrossEntropy(scorer->Score(sentence.text, target, t.id), LossReduction::kMean);
  }
  return pred;
}

}  // namespace

std::vector<SentencePrediction> Predict(
    std::span<const LabeledSentence> query, std::span<const Template> templates,
    const Generator &generator, const Scorer *scorer,
    AggregationStrategy aggregation, std::size_t tau, std::uint64_t seed,
    std::size_t jobs) {
  if (templates.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no templates to predict with");
  }
  if (aggregation == AggregationStrategy::kRank && scorer == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "rank aggregation needs a scorer");
  }
  if (aggregation == AggregationStrategy::kVote &&
      (tau < 1 || tau > templates.size())) {
    throw Error(ErrorCode::kInvalidTau,
                "tau=" + std::to_string(tau) + " outside [1, " +
                    std::to_string(templates.size()) + "]");
  }
  const Scorer *nll_scorer =
      aggregation == AggregationStrategy::kRank ? scorer : nullptr;
  const std::size_t t_count = templates.size();
  std::vector<TemplatePrediction> cells(query.size() * t_count);
  std::vector<std::size_t> malformed(cells.size(), 0);
  ParallelFor(cells.size(), jobs, [&](std::size_t c) {
    cells[c] = PredictOne(query[c / t_count], templates[c % t_count], generator,
                          nll_scorer, &malformed[c]);
  });

  std::vector<SentencePrediction> out(query.size());
  for (std::size_t i = 0; i < query.size(); ++i) {
    SentencePrediction &sp = out[i];
    sp.id = query[i].id;
    for (std::size_t t = 0; t < t_count; ++t) {
      sp.per_template.push_back(std::move(cells[i * t_count + t]));
      sp.malformed += malformed[i * t_count + t];
    }
    sp.quads = Aggregate(sp.per_template, aggregation, tau,
                         Mix64(seed ^ Fnv1a64(sp.id)));
  }
  return out;
}

std::vector<Template> TemplatesById(std::span<const std::string> ids) {
  std::vector<Template> out;
  for (const auto &id : ids) out.push_back(FindTemplate(id));
  return out;
}

std::vector<SentenceQuads> FinalQuads(std::span<const SentencePrediction> preds) {
  std::vector<SentenceQuads> out;
  for (const auto &p : preds) out.push_back({p.id, p.quads});
  return out;
}

EpisodeResult RunEpisode(std::span<const LabeledSentence> support,
                         std::span<const LabeledSentence> query,
                         const Scorer &scorer, const Generator &generator,
                         const PipelineConfig &config) {
  EpisodeResult result;
  result.selection = SelectForSupport(support, ListTemplates(), scorer,
                                      config.k_templates, config.selection,
                                      config.seed, config.jobs);
  const auto templates = TemplatesById(result.selection.selected);
  result.predictions =
      Predict(query, templates, generator, &scorer, config.aggregation,
              config.EffectiveTau(), config.seed, config.jobs);
  const auto gold = ToSentenceQuads(query);
  const auto pred = FinalQuads(result.predictions);
  result.report = Evaluate(gold, pred);
  return result;
}

}  // namespace bvsp
