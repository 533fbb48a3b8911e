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

#include "bvsp/selection.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <tuple>

#include "bvsp/error.h"
#include "bvsp/parallel.h"
#include "bvsp/rng.h"

namespace bvsp {

FilteredRepresentation Filter(const ScoredTarget &st,
                              const TargetSequence &target) {
  if (st.target_text != target.text) {
    throw Error(ErrorCode::kSpanMismatch,
                "scored text '" + st.target_text + "' differs from target '" +
                    target.text + "'");
  }
  FilteredRepresentation rep;
  std::vector<std::size_t> next_index(target.elements.size(), 0);
  const std::size_t n = std::min(st.tokens.size(), st.distributions.size());
  std::size_t first = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const Token &tok = st.tokens[t];
    if (tok.start >= tok.end) continue;
    // Element spans are in text order; skip those entirely before the token.
    while (first < target.elements.size() &&
           target.elements[first].end <= tok.start) {
      ++first;
    }
    for (std::size_t e = first; e < target.elements.size(); ++e) {
      const ElementSpan &span = target.elements[e];
      if (span.start >= tok.end) break;
      if (tok.start < span.end && span.start < tok.end) {
        rep.slots.push_back({span.quad_index, span.role, next_index[e]++,
                             st.distributions[t]});
        break;
      }
    }
  }
  return rep;
}

double JsDivergence(const TokenDistribution &p, const TokenDistribution &q) {
  using Entry = std::pair<std::string_view, double>;
  auto sorted = [](const TokenDistribution &d) {
    std::vector<Entry> v(d.support.begin(), d.support.end());
    std::sort(v.begin(), v.end(),
              [](const Entry &a, const Entry &b) { return a.first < b.first; });
    return v;
  };
  const std::vector<Entry> ps = sorted(p);
  const std::vector<Entry> qs = sorted(q);

  double sum_p = 0.0;
  double sum_q = 0.0;
  auto accumulate = [&](double a, double b) {
    const double m = 0.5 * a + 0.5 * b;
    if (a > 0.0) sum_p += a * std::log(a / m);
    if (b > 0.0) sum_q += b * std::log(b / m);
  };
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ps.size() || j < qs.size()) {
    if (j == qs.size() || (i < ps.size() && ps[i].first < qs[j].first)) {
      accumulate(ps[i++].second, 0.0);
    } else if (i == ps.size() || qs[j].first < ps[i].first) {
      accumulate(0.0, qs[j++].second);
    } else {
      accumulate(ps[i++].second, qs[j++].second);
    }
  }
  accumulate(p.other_mass, q.other_mass);
  const double js = 0.5 * sum_p + 0.5 * sum_q;
  return std::clamp(js, 0.0, std::numbers::ln2);
}

AlignedDivergence PairDivergence(const FilteredRepresentation &hi,
                                 const FilteredRepresentation &hj) {
  using Key = std::tuple<std::size_t, int, std::size_t>;
  auto index = [](const FilteredRepresentation &h) {
    std::map<Key, const TokenDistribution *> m;
    for (const auto &s : h.slots) {
      m.emplace(Key{s.quad_index, static_cast<int>(s.role), s.token_index},
                &s.distribution);
    }
    return m;
  };
  const auto a = index(hi);
  const auto b = index(hj);
  AlignedDivergence out;
  double sum = 0.0;
  for (const auto &[key, dist] : a) {
    const auto it = b.find(key);
    if (it == b.end()) continue;
    sum += JsDivergence(*dist, *it->second);
    ++out.aligned_pairs;
  }
  if (out.aligned_pairs > 0) {
    out.value = sum / static_cast<double>(out.aligned_pairs);
  }
  return out;
}

CorrelationMatrix::CorrelationMatrix(std::vector<std::string> template_ids)
    : ids_(std::move(template_ids)), values_(ids_.size() * ids_.size(), 0.0) {}

double CorrelationMatrix::RowMean(std::size_t i) const {
  if (size() < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < size(); ++j) {
    if (j != i) sum += at(i, j);
  }
  return sum / static_cast<double>(size() - 1);
}

std::string CorrelationMatrix::ToTsv() const {
  std::ostringstream out;
  out << "template";
  for (const auto &id : ids_) out << '\t' << id;
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < size(); ++i) {
    out << ids_[i];
    for (std::size_t j = 0; j < size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.9g", at(i, j));
      out << '\t' << buf;
    }
    out << '\n';
  }
  return out.str();
}

double Entropy(const TokenDistribution &d) {
  double h = 0.0;
  for (const auto &[key, p] : d.support) {
    if (p > 0.0) h -= p * std::log(p);
  }
  if (d.other_mass > 0.0) h -= d.other_mass * std::log(d.other_mass);
  return h;
}

CorrelationResult ComputeCorrelationMatrix(
    std::span<const LabeledSentence> support,
    std::span<const Template> templates, const Scorer &scorer,
    const CorrelationOptions &options) {
  if (support.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "support set is empty");
  }
  const std::size_t num_t = templates.size();
  const std::size_t num_d = support.size();

  std::vector<std::string> ids;
  for (const auto &t : templates) ids.push_back(t.id);
  CorrelationResult result;
  result.matrix = CorrelationMatrix(ids);
  result.instance_counts.assign(num_t * num_t, 0);
  result.mean_entropy.assign(num_t, 0.0);

  // reps[d * T + t] is empty when instance d cannot be rendered under t.
  std::vector<std::optional<FilteredRepresentation>> reps(num_d * num_t);
  ParallelFor(num_d * num_t, options.jobs, [&](std::size_t idx) {
    const LabeledSentence &s = support[idx / num_t];
    const Template &t = templates[idx % num_t];
    std::vector<SurfaceQuad> surface;
    for (const auto &q : s.quads) {
      surface.push_back(Project(q));
      if (!IsRenderable(surface.back(), t)) return;
    }
    if (surface.empty()) return;
    const TargetSequence target = Render(surface, t);
    const ScoredTarget st = scorer.Score(s.text, target, t.id);
    reps[idx] = Filter(st, target);
  });

  for (std::size_t t = 0; t < num_t; ++t) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t d = 0; d < num_d; ++d) {
      const auto &rep = reps[d * num_t + t];
      if (!rep) {
        ++result.unrenderable;
        continue;
      }
      for (const auto &slot : rep->slots) {
        sum += Entropy(slot.distribution);
        ++count;
      }
    }
    result.mean_entropy[t] = count > 0 ? sum / static_cast<double>(count) : 0.0;
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < num_t; ++i) {
    for (std::size_t j = i + 1; j < num_t; ++j) pairs.emplace_back(i, j);
  }
  std::vector<std::size_t> empty(pairs.size(), 0);
  ParallelFor(pairs.size(), options.jobs, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t d = 0; d < num_d; ++d) {
      const auto &a = reps[d * num_t + i];
      const auto &b = reps[d * num_t + j];
      if (!a || !b) continue;
      const AlignedDivergence div = PairDivergence(*a, *b);
      if (div.aligned_pairs == 0) ++empty[p];
      sum += div.value;
      ++count;
    }
    const double mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
    result.matrix.set(i, j, mean);
    result.matrix.set(j, i, mean);
    result.instance_counts[i * num_t + j] = count;
    result.instance_counts[j * num_t + i] = count;
  });
  for (std::size_t e : empty) result.empty_alignments += e;
  return result;
}

namespace {

struct PairEntry {
  double value;
  std::size_t a;  // endpoint whose id sorts first
  std::size_t b;
};

std::vector<std::string> WalkPairs(const CorrelationMatrix &s, std::size_t k,
                                   bool ascending) {
  const std::size_t n = s.size();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidK, "k=" + std::to_string(k) +
                                          " outside [1, " + std::to_string(n) +
                                          "]");
  }
  const auto &ids = s.template_ids();
  std::vector<PairEntry> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool i_first = ids[i] <= ids[j];
      pairs.push_back({s.at(i, j), i_first ? i : j, i_first ? j : i});
    }
  }
  std::sort(pairs.begin(), pairs.end(),
            [&](const PairEntry &x, const PairEntry &y) {
              if (x.value != y.value) {
                return ascending ? x.value < y.value : x.value > y.value;
              }
              if (ids[x.a] != ids[y.a]) return ids[x.a] < ids[y.a];
              return ids[x.b] < ids[y.b];
            });

  std::vector<std::size_t> chosen;
  std::vector<bool> taken(n, false);
  auto take = [&](std::size_t i) {
    taken[i] = true;
    chosen.push_back(i);
  };
  if (n == 1) take(0);
  for (const PairEntry &p : pairs) {
    if (chosen.size() >= k) break;
    const bool need_a = !taken[p.a];
    const bool need_b = !taken[p.b];
    if (need_a && need_b && chosen.size() + 2 > k) {
      const double ma = s.RowMean(p.a);
      const double mb = s.RowMean(p.b);
      bool prefer_a;
      if (ma != mb) {
        prefer_a = ascending ? ma < mb : ma > mb;
      } else {
        prefer_a = ids[p.a] <= ids[p.b];
      }
      take(prefer_a ? p.a : p.b);
      continue;
    }
    if (need_a) take(p.a);
    if (need_b) take(p.b);
  }
  std::vector<std::string> out;
  for (std::size_t i : chosen) out.push_back(ids[i]);
  return out;
}

}  // namespace

std::vector<std::string> SelectTopK(const CorrelationMatrix &s, std::size_t k) {
  return WalkPairs(s, k, /*ascending=*/true);
}

const char *SelectionStrategyName(SelectionStrategy s) {
  switch (s) {
    case SelectionStrategy::kJsMin: return "js-min";
    case SelectionStrategy::kJsMax: return "js-max";
    case SelectionStrategy::kEntropyMin: return "entropy-min";
    case SelectionStrategy::kEntropyMax: return "entropy-max";
    case SelectionStrategy::kRandom: return "random";
  }
  return "unknown";
}

SelectionStrategy ParseSelectionStrategy(std::string_view name) {
  for (auto s : {SelectionStrategy::kJsMin, SelectionStrategy::kJsMax,
                 SelectionStrategy::kEntropyMin, SelectionStrategy::kEntropyMax,
                 SelectionStrategy::kRandom}) {
    if (name == SelectionStrategyName(s)) return s;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown selection strategy '" + std::string(name) + "'");
}

std::vector<std::string> SelectTemplates(const CorrelationResult &result,
                                         std::size_t k,
                                         SelectionStrategy strategy,
                                         std::uint64_t seed) {
  const CorrelationMatrix &s = result.matrix;
  const auto &ids = s.template_ids();
  switch (strategy) {
    case SelectionStrategy::kJsMin:
      return WalkPairs(s, k, true);
    case SelectionStrategy::kJsMax:
      return WalkPairs(s, k, false);
    case SelectionStrategy::kEntropyMin:
    case SelectionStrategy::kEntropyMax:
    case SelectionStrategy::kRandom:
      break;
  }
  if (k < 1 || k > ids.size()) {
    throw Error(ErrorCode::kInvalidK, "k=" + std::to_string(k) +
                                          " outside [1, " +
                                          std::to_string(ids.size()) + "]");
  }
  std::vector<std::size_t> order(ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (strategy == SelectionStrategy::kRandom) {
    Rng rng(seed);
    rng.Shuffle(order);
  } else {
    const bool low = strategy == SelectionStrategy::kEntropyMin;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double ea = result.mean_entropy[a];
      const double eb = result.mean_entropy[b];
      if (ea != eb) return low ? ea < eb : ea > eb;
      return ids[a] < ids[b];
    });
  }
  std::vector<std::string> out;
  for (std::size_t r = 0; r < k; ++r) out.push_back(ids[order[r]]);
  return out;
}

}  // namespace bvsp
