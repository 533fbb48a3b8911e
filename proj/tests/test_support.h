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

// Random generators and brute-force oracles shared by the unit tests and the
// acceptance binary. The oracles are written independently of the library
// code they check (dense maps, straight loops, no shared helpers).

#ifndef BVSP_TESTS_TEST_SUPPORT_H_
#define BVSP_TESTS_TEST_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "bvsp/quad.h"
#include "bvsp/rng.h"
#include "bvsp/scoring.h"
#include "bvsp/selection.h"
#include "bvsp/template.h"

namespace bvsp::testing {

inline const std::vector<std::string> &Words() {
  static const std::vector<std::string> w = {
      "room",  "clean", "staff", "rude",  "food",     "great", "pizza",
      "cheap", "view",  "bed",   "small", "very",     "not",   "quite",
      "menu",  "wine",  "price", "noisy", "friendly", "dirty", "Sushi",
      "Wi-Fi", "5",     "don't", "open",  "late",     "hot",   "tea"};
  return w;
}

inline const std::vector<std::string> &CategoryPool() {
  static const std::vector<std::string> c = {
      "room_overall", "service",  "food#quality", "location",
      "price",        "ambience", "drinks#style", "hotel_general"};
  return c;
}

inline std::string RandomPhrase(Rng &rng, std::size_t max_words = 3) {
  const std::size_t n = 1 + rng.Below(max_words);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) s += ' ';
    s += Words()[rng.Below(Words().size())];
  }
  return s;
}

inline Term RandomTerm(Rng &rng, double implicit_rate = 0.2) {
  if (rng.Uniform() < implicit_rate) return Term::Implicit();
  return Term::Explicit(RandomPhrase(rng));
}

inline SentimentQuad RandomQuad(Rng &rng, double implicit_rate = 0.2) {
  SentimentQuad q;
  q.aspect = RandomTerm(rng, implicit_rate);
  q.opinion = RandomTerm(rng, implicit_rate);
  q.category = CategoryPool()[rng.Below(CategoryPool().size())];
  q.polarity = static_cast<Polarity>(rng.Below(3));
  return q;
}

inline std::vector<SentimentQuad> RandomQuads(Rng &rng, std::size_t max_n = 4) {
  std::vector<SentimentQuad> out;
  const std::size_t n = 1 + rng.Below(max_n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(RandomQuad(rng));
  return out;
}

inline std::vector<SurfaceQuad> ProjectAll(const std::vector<SentimentQuad> &qs) {
  std::vector<SurfaceQuad> out;
  for (const auto &q : qs) out.push_back(Project(q));
  return out;
}

// Sparse distribution over a small vocabulary, with random OTHER mass.
inline TokenDistribution RandomDistribution(Rng &rng, std::size_t vocab = 12,
                                            std::size_t max_support = 6) {
  const std::size_t n = rng.Below(max_support + 1);
  std::set<std::size_t> ids;
  while (ids.size() < n) ids.insert(rng.Below(vocab));
  std::vector<double> w;
  for (std::size_t i = 0; i < n; ++i) {
    // Occasional exact zeros exercise the 0 log 0 convention.
    w.push_back(rng.Uniform() < 0.1 ? 0.0 : rng.Uniform());
  }
  double other = rng.Uniform() < 0.3 ? 0.0 : rng.Uniform();
  double total = other;
  for (double x : w) total += x;
  if (total == 0.0) {
    other = 1.0;
    total = 1.0;
  }
  TokenDistribution d;
  std::size_t i = 0;
  for (std::size_t id : ids) {
    d.support.emplace_back("t" + std::to_string(id), w[i++] / total);
  }
  d.other_mass = other / total;
  return d;
}

// JS divergence evaluated directly from its definition on the dense merged
// outcome space (support tokens plus one OTHER outcome), natural log.
inline double OracleJs(const TokenDistribution &p, const TokenDistribution &q) {
  std::map<std::string, std::pair<long double, long double>> dense;
  for (const auto &[t, v] : p.support) dense[t].first = v;
  for (const auto &[t, v] : q.support) dense[t].second = v;
  std::vector<std::pair<long double, long double>> outcomes;
  for (const auto &[t, pq] : dense) outcomes.push_back(pq);
  outcomes.push_back({p.other_mass, q.other_mass});
  long double kl_pm = 0.0L;
  long double kl_qm = 0.0L;
  for (const auto &[a, b] : outcomes) {
    const long double m = (a + b) / 2.0L;
    if (a > 0.0L) kl_pm += a * std::log(a / m);
    if (b > 0.0L) kl_qm += b * std::log(b / m);
  }
  return static_cast<double>((kl_pm + kl_qm) / 2.0L);
}

// Slot key -> distribution by a direct walk over token spans.
using OracleSlots =
    std::map<std::tuple<std::size_t, int, std::size_t>, TokenDistribution>;

inline OracleSlots OracleFilter(const ScoredTarget &st, const TargetSequence &target) {
  OracleSlots out;
  std::map<std::pair<std::size_t, int>, std::size_t> seen;
  for (std::size_t t = 0; t < st.tokens.size(); ++t) {
    for (const auto &e : target.elements) {
      if (st.tokens[t].start < e.end && e.start < st.tokens[t].end) {
        const auto key = std::make_pair(e.quad_index, static_cast<int>(e.role));
        const std::size_t idx = seen[key]++;
        out[{e.quad_index, static_cast<int>(e.role), idx}] = st.distributions[t];
        break;
      }
    }
  }
  return out;
}

// Returns (mean JS over aligned slots, number of aligned slots).
inline std::pair<double, std::size_t> OraclePair(const OracleSlots &a,
                                                 const OracleSlots &b) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto &[key, d] : a) {
    const auto it = b.find(key);
    if (it == b.end()) continue;
    sum += OracleJs(d, it->second);
    ++n;
  }
  return {n == 0 ? 0.0 : sum / static_cast<double>(n), n};
}

// Correlation matrix recomputed from scratch: every template pair, every
// instance, scoring again each time.
inline std::vector<double> OracleMatrix(const std::vector<LabeledSentence> &support,
                                        const std::vector<Template> &templates,
                                        const Scorer &scorer) {
  const std::size_t n = templates.size();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double sum = 0.0;
      std::size_t count = 0;
      for (const auto &s : support) {
        const auto surface = ProjectAll(s.quads);
        bool ok = !surface.empty();
        for (const auto &q : surface) {
          ok = ok && IsRenderable(q, templates[i]) && IsRenderable(q, templates[j]);
        }
        if (!ok) continue;
        const TargetSequence ti = Render(surface, templates[i]);
        const TargetSequence tj = Render(surface, templates[j]);
        const auto si = OracleFilter(scorer.Score(s.text, ti, templates[i].id), ti);
        const auto sj = OracleFilter(scorer.Score(s.text, tj, templates[j].id), tj);
        sum += OraclePair(si, sj).first;
        ++count;
      }
      m[i * n + j] = count == 0 ? 0.0 : sum / static_cast<double>(count);
    }
  }
  return m;
}

// Pair-walk selection restated: candidate pairs sorted by (value, lower id,
// higher id); both endpoints join; on overshoot the endpoint with the lower
// off-diagonal row mean (then lower id) joins alone.
inline std::vector<std::string> OracleSelect(const std::vector<std::string> &ids,
                                             const std::vector<double> &m,
                                             std::size_t k) {
  const std::size_t n = ids.size();
  if (n == 1) return {ids[0]};
  std::map<std::string, double> row_mean;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) s += m[i * n + j];
    }
    row_mean[ids[i]] = s / static_cast<double>(n - 1);
  }
  std::vector<std::tuple<double, std::string, std::string>> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      pairs.emplace_back(m[i * n + j], std::min(ids[i], ids[j]), std::max(ids[i], ids[j]));
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<std::string> chosen;
  auto has = [&](const std::string &id) {
    return std::find(chosen.begin(), chosen.end(), id) != chosen.end();
  };
  for (const auto &[v, a, b] : pairs) {
    if (chosen.size() >= k) break;
    if (!has(a) && !has(b) && chosen.size() + 1 == k) {
      const bool pick_a = row_mean[a] < row_mean[b] ||
                          (row_mean[a] == row_mean[b] && a <= b);
      chosen.push_back(pick_a ? a : b);
      continue;
    }
    if (!has(a)) chosen.push_back(a);
    if (!has(b)) chosen.push_back(b);
  }
  return chosen;
}

// Per-sentence set counting by pairwise comparison of canonical forms.
struct OracleCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

inline std::string OracleNorm(const std::string &s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  }
  return out;
}

inline std::string OracleTerm(const Term &t) {
  return t.implicit() ? std::string("<implicit>") : "'" + OracleNorm(t.text());
}

inline std::vector<std::string> OracleFields(const SentimentQuad &q) {
  return {OracleTerm(q.aspect), OracleTerm(q.opinion), OracleNorm(q.category),
          std::to_string(static_cast<int>(q.polarity))};
}

// O(n^2) matching over a sentence; `role` < 0 means the whole quad.
inline OracleCounts OracleSentence(const std::vector<SentimentQuad> &gold,
                                   const std::vector<SentimentQuad> &pred, int role) {
  auto project = [&](const std::vector<SentimentQuad> &qs) {
    std::vector<std::vector<std::string>> items;
    for (const auto &q : qs) {
      auto f = OracleFields(q);
      std::vector<std::string> item =
          role < 0 ? f : std::vector<std::string>{f[static_cast<std::size_t>(role)]};
      bool dup = false;
      for (const auto &x : items) dup = dup || x == item;
      if (!dup) items.push_back(item);
    }
    return items;
  };
  const auto g = project(gold);
  const auto p = project(pred);
  OracleCounts c;
  for (const auto &x : p) {
    bool hit = false;
    for (const auto &y : g) hit = hit || x == y;
    if (hit) ++c.tp;
  }
  c.fp = p.size() - c.tp;
  c.fn = g.size() - c.tp;
  return c;
}

}  // namespace bvsp::testing

#endif  // BVSP_TESTS_TEST_SUPPORT_H_
