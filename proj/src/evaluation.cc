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

#include "bvsp/evaluation.h"

#include <algorithm>
#include <set>
#include <unordered_map>

#include "bvsp/error.h"

namespace bvsp {

namespace {

double SafeDiv(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

Counts CountSets(const std::set<std::string> &gold,
                 const std::set<std::string> &pred) {
  Counts c;
  for (const auto &k : pred) {
    if (gold.count(k)) ++c.tp;
  }
  c.fp = pred.size() - c.tp;
  c.fn = gold.size() - c.tp;
  return c;
}

std::set<std::string> QuadKeys(std::span<const SentimentQuad> quads) {
  std::set<std::string> keys;
  for (const auto &q : quads) keys.insert(CanonicalKey(q));
  return keys;
}

std::set<std::string> RoleKeys(std::span<const SentimentQuad> quads, Role role) {
  std::set<std::string> keys;
  for (const auto &q : quads) keys.insert(RoleKey(q, role));
  return keys;
}

// Pairs every gold sentence with its prediction (or nothing).
std::vector<const SentenceQuads *> AlignPredictions(
    std::span<const SentenceQuads> gold, std::span<const SentenceQuads> pred) {
  std::unordered_map<std::string_view, std::size_t> gold_index;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!gold_index.emplace(gold[i].id, i).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "gold id '" + gold[i].id + "' appears more than once");
    }
  }
  std::vector<const SentenceQuads *> aligned(gold.size(), nullptr);
  for (const auto &p : pred) {
    const auto it = gold_index.find(p.id);
    if (it == gold_index.end()) {
      throw Error(ErrorCode::kUnknownId,
                  "predicted id '" + p.id + "' is not in gold");
    }
    if (aligned[it->second] != nullptr) {
      throw Error(ErrorCode::kDuplicateId,
                  "predicted id '" + p.id + "' appears more than once");
    }
    aligned[it->second] = &p;
  }
  return aligned;
}

std::span<const SentimentQuad> QuadsOf(const SentenceQuads *s) {
  if (s == nullptr) return {};
  return s->quads;
}

}  // namespace

void Metrics::Finalize() {
  precision = SafeDiv(static_cast<double>(tp), static_cast<double>(tp + fp));
  recall = SafeDiv(static_cast<double>(tp), static_cast<double>(tp + fn));
  f1 = SafeDiv(2.0 * precision * recall, precision + recall);
}

void Metrics::Add(std::size_t tp_, std::size_t fp_, std::size_t fn_) {
  tp += tp_;
  fp += fp_;
  fn += fn_;
}

bool IsExplicitSentence(std::span<const SentimentQuad> gold) {
  return std::all_of(gold.begin(), gold.end(), [](const SentimentQuad &q) {
    return !q.aspect.implicit() && !q.opinion.implicit();
  });
}

ExplicitImplicitSplit SplitExplicitImplicit(std::span<const SentenceQuads> gold) {
  ExplicitImplicitSplit split;
  for (const auto &s : gold) {
    (IsExplicitSentence(s.quads) ? split.explicit_ids : split.implicit_ids)
        .push_back(s.id);
  }
  return split;
}

std::array<Metrics, 4> EvaluateElements(std::span<const SentenceQuads> gold,
                                        std::span<const SentenceQuads> pred) {
  const auto aligned = AlignPredictions(gold, pred);
  std::array<Metrics, 4> out;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (Role role : kAllRoles) {
      const Counts c = CountSets(RoleKeys(gold[i].quads, role),
                                 RoleKeys(QuadsOf(aligned[i]), role));
      out[static_cast<std::size_t>(role)].Add(c.tp, c.fp, c.fn);
    }
  }
  for (auto &m : out) m.Finalize();
  return out;
}

EvalReport Evaluate(std::span<const SentenceQuads> gold,
                    std::span<const SentenceQuads> pred,
                    const EvalOptions &options) {
  const auto aligned = AlignPredictions(gold, pred);
  EvalReport report;
  report.num_sentences = gold.size();
  MacroMetrics macro;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto predicted = QuadsOf(aligned[i]);
    const Counts c = CountSets(QuadKeys(gold[i].quads), QuadKeys(predicted));
    report.quad.Add(c.tp, c.fp, c.fn);
    if (IsExplicitSentence(gold[i].quads)) {
      report.explicit_subset.Add(c.tp, c.fp, c.fn);
      ++report.num_explicit;
    } else {
      report.implicit_subset.Add(c.tp, c.fp, c.fn);
      ++report.num_implicit;
    }
    if (options.macro) {
      Metrics one;
      one.Add(c.tp, c.fp, c.fn);
      one.Finalize();
      macro.precision += one.precision;
      macro.recall += one.recall;
      macro.f1 += one.f1;
    }
  }
  report.quad.Finalize();
  report.explicit_subset.Finalize();
  report.implicit_subset.Finalize();
  report.elements = EvaluateElements(gold, pred);
  if (options.macro) {
    const double n = static_cast<double>(std::max<std::size_t>(gold.size(), 1));
    macro.precision /= n;
    macro.recall /= n;
    macro.f1 /= n;
    report.macro = macro;
  }
  return report;
}

std::vector<SentenceQuads> ToSentenceQuads(
    std::span<const LabeledSentence> sentences) {
  std::vector<SentenceQuads> out;
  out.reserve(sentences.size());
  for (const auto &s : sentences) out.push_back({s.id, s.quads});
  return out;
}

}  // namespace bvsp
