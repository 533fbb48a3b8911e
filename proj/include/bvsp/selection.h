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

// Template selection by Jensen-Shannon divergence.
//
// For one instance, every template's target sequence is scored under teacher
// forcing and reduced to the distributions at quad-element tokens (linking
// words, markers and separators are filtered out). Two templates are compared
// by the mean JS divergence over element token slots aligned by
// (quad index, element role, token index within the element). Averaging over
// the support set gives the T x T correlation matrix; the k most correlated
// templates are read off the smallest off-diagonal entries.
//
// All divergences are in nats, so every entry lies in [0, ln 2].

#ifndef BVSP_SELECTION_H_
#define BVSP_SELECTION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bvsp/quad.h"
#include "bvsp/scoring.h"
#include "bvsp/template.h"

namespace bvsp {

struct FilteredSlot {
  std::size_t quad_index = 0;
  Role role = Role::kAspect;
  // Index of this token within its element occurrence.
  std::size_t token_index = 0;
  TokenDistribution distribution;
};

struct FilteredRepresentation {
  std::vector<FilteredSlot> slots;
};

// Keeps the distributions at token positions whose span overlaps an element
// span. Throws SpanMismatch when `st` does not score `target.text`.
FilteredRepresentation Filter(const ScoredTarget &st,
                              const TargetSequence &target);

// JS divergence over the union of both supports plus one shared OTHER
// outcome. Exactly symmetric; exactly 0 for identical inputs; clamped to
// [0, ln 2].
double JsDivergence(const TokenDistribution &p, const TokenDistribution &q);

struct AlignedDivergence {
  double value = 0.0;
  // Number of aligned slot pairs; 0 means nothing aligned and value is 0.
  std::size_t aligned_pairs = 0;
};

// Mean JsDivergence over slots present in both representations, summed in
// key order. Elements with different token counts are truncated to the
// shorter one.
AlignedDivergence PairDivergence(const FilteredRepresentation &hi,
                                 const FilteredRepresentation &hj);

class CorrelationMatrix {
 public:
  CorrelationMatrix() = default;
  explicit CorrelationMatrix(std::vector<std::string> template_ids);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string> &template_ids() const { return ids_; }

  double at(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
  void set(std::size_t i, std::size_t j, double v) { values_[i * size() + j] = v; }

  // Mean of row i over the off-diagonal entries.
  double RowMean(std::size_t i) const;

  // Header row of ids, then one row per template; 9 significant digits.
  std::string ToTsv() const;

 private:
  std::vector<std::string> ids_;
  std::vector<double> values_;
};

struct CorrelationOptions {
  std::size_t jobs = 1;
};

struct CorrelationResult {
  CorrelationMatrix matrix;
  // instance_counts[i * T + j]: support instances that contributed to (i, j).
  std::vector<std::size_t> instance_counts;
  // (instance, template) combinations that could not be rendered.
  std::size_t unrenderable = 0;
  // Instance pairs whose filtered representations had no aligned slots.
  std::size_t empty_alignments = 0;
  // Mean entropy (nats) of the filtered distributions per template; used by
  // the entropy ablation strategies.
  std::vector<double> mean_entropy;
};

// Entry (i, j) is the mean PairDivergence over support instances renderable
// under both templates (0 when there are none); the diagonal is 0. Throws
// InvalidArgument on an empty support set; scorer errors propagate.
CorrelationResult ComputeCorrelationMatrix(
    std::span<const LabeledSentence> support,
    std::span<const Template> templates, const Scorer &scorer,
    const CorrelationOptions &options = {});

// Walks the upper-triangle pairs in ascending order of value (ties: by the
// ordered id pair), adding both endpoints to the selection until it holds k
// ids. If a pair would overshoot, only the endpoint with the smaller row mean
// (ties: smaller id) is added. Returns ids in insertion order. Throws InvalidK
// unless 1 <= k <= T.
std::vector<std::string> SelectTopK(const CorrelationMatrix &s, std::size_t k);

enum class SelectionStrategy { kJsMin, kJsMax, kEntropyMin, kEntropyMax, kRandom };

const char *SelectionStrategyName(SelectionStrategy s);
// Accepts "js-min", "js-max", "entropy-min", "entropy-max", "random".
SelectionStrategy ParseSelectionStrategy(std::string_view name);

// kJsMin is SelectTopK. kJsMax walks pairs in descending order and keeps the
// endpoint with the larger row mean on overshoot. The entropy strategies rank
// templates by mean entropy; kRandom draws k ids with `seed`.
std::vector<std::string> SelectTemplates(const CorrelationResult &result,
                                         std::size_t k,
                                         SelectionStrategy strategy,
                                         std::uint64_t seed = 0);

// Entropy in nats of a sparse distribution, OTHER counted as one outcome.
double Entropy(const TokenDistribution &d);

}  // namespace bvsp

#endif  // BVSP_SELECTION_H_
