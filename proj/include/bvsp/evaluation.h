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

// Exact-match precision / recall / F1 for quad prediction.
//
// Counts are micro-averaged over the corpus. Within a sentence both the gold
// and the predicted quads are treated as sets under Equivalent(). The
// element-level reports project each sentence's quads onto a single role,
// deduplicate, and count the same way.

#ifndef BVSP_EVALUATION_H_
#define BVSP_EVALUATION_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bvsp/quad.h"

namespace bvsp {

struct Metrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  // Fills precision/recall/f1 from the counts; 0/0 is 0.
  void Finalize();
  void Add(std::size_t tp_, std::size_t fp_, std::size_t fn_);
};

struct SentenceQuads {
  std::string id;
  std::vector<SentimentQuad> quads;
};

struct MacroMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  std::size_t num_sentences = 0;
  Metrics quad;
  // Indexed by Role.
  std::array<Metrics, 4> elements;
  Metrics explicit_subset;
  Metrics implicit_subset;
  std::size_t num_explicit = 0;
  std::size_t num_implicit = 0;
  // Per-sentence averages, filled when requested.
  std::optional<MacroMetrics> macro;
};

struct EvalOptions {
  bool macro = false;
};

// Throws DuplicateId when an id repeats within gold or within pred, and
// UnknownId when a predicted id is absent from gold. Gold sentences without a
// prediction count as empty predictions.
EvalReport Evaluate(std::span<const SentenceQuads> gold,
                    std::span<const SentenceQuads> pred,
                    const EvalOptions &options = {});

// Element-level reports alone, indexed by Role. Same errors as Evaluate.
std::array<Metrics, 4> EvaluateElements(std::span<const SentenceQuads> gold,
                                        std::span<const SentenceQuads> pred);

struct ExplicitImplicitSplit {
  std::vector<std::string> explicit_ids;
  std::vector<std::string> implicit_ids;
};

// A sentence is explicit iff every gold quad has explicit aspect and opinion
// terms (vacuously true for no quads).
bool IsExplicitSentence(std::span<const SentimentQuad> gold);
ExplicitImplicitSplit SplitExplicitImplicit(std::span<const SentenceQuads> gold);

std::vector<SentenceQuads> ToSentenceQuads(std::span<const LabeledSentence> sentences);

}  // namespace bvsp

#endif  // BVSP_EVALUATION_H_
