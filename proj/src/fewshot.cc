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

#include "bvsp/fewshot.h"

#include <cmath>
#include <set>
#include <unordered_map>

#include "bvsp/error.h"
#include "bvsp/rng.h"
#include "bvsp/text.h"

namespace bvsp {

namespace {

std::unordered_map<std::string_view, std::size_t> IndexIds(const Dataset &pool) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < pool.sentences.size(); ++i) {
    if (!index.emplace(pool.sentences[i].id, i).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "pool id '" + pool.sentences[i].id + "' appears more than once");
    }
  }
  return index;
}

}  // namespace

Episode SampleEpisode(const Dataset &pool, std::size_t k, std::uint64_t seed) {
  if (pool.sentences.empty()) throw Error(ErrorCode::kEmptyPool, "pool is empty");
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "shots must be positive");
  IndexIds(pool);

  const std::size_t n = pool.sentences.size();
  std::vector<std::set<std::string>> categories_of(n);
  std::map<std::string, std::vector<std::size_t>> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto &c : pool.sentences[i].Categories()) {
      categories_of[i].insert(c);
      candidates[c].push_back(i);
    }
  }
  for (auto &[category, list] : candidates) {
    Rng rng(Mix64(seed ^ Fnv1a64(category)));
    rng.Shuffle(list);
  }

  std::vector<bool> selected(n, false);
  std::map<std::string, std::size_t> have;
  std::map<std::string, std::size_t> cursor;
  for (std::size_t round = 1; round <= k; ++round) {
    for (const auto &[category, list] : candidates) {
      std::size_t &pos = cursor[category];
      while (have[category] < round && pos < list.size()) {
        const std::size_t i = list[pos++];
        if (selected[i]) continue;
        selected[i] = true;
        for (const auto &c : categories_of[i]) ++have[c];
      }
    }
  }

  Episode episode;
  episode.shots = k;
  episode.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    (selected[i] ? episode.support_ids : episode.query_ids)
        .push_back(pool.sentences[i].id);
  }
  return episode;
}

std::vector<Episode> SampleEpisodes(const Dataset &pool, std::size_t k,
                                    std::size_t runs, std::uint64_t seed0) {
  if (runs == 0) throw Error(ErrorCode::kInvalidArgument, "runs must be positive");
  std::vector<Episode> out;
  for (std::size_t r = 0; r < runs; ++r) out.push_back(SampleEpisode(pool, k, seed0 + r));
  return out;
}

EpisodeSplit Materialize(const Dataset &pool, const Episode &episode) {
  const auto index = IndexIds(pool);
  auto collect = [&](const std::vector<std::string> &ids) {
    std::vector<LabeledSentence> out;
    for (const auto &id : ids) {
      const auto it = index.find(id);
      if (it == index.end()) {
        throw Error(ErrorCode::kUnknownId, "episode id '" + id + "' is not in the pool");
      }
      out.push_back(pool.sentences[it->second]);
    }
    return out;
  };
  return {collect(episode.support_ids), collect(episode.query_ids)};
}

Moments ComputeMoments(std::span<const double> values) {
  Moments m;
  if (values.empty()) return m;
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return m;
}

std::map<std::string, double> FlattenMetrics(const EvalReport &report) {
  std::map<std::string, double> out;
  out["quad.precision"] = report.quad.precision;
  out["quad.recall"] = report.quad.recall;
  out["quad.f1"] = report.quad.f1;
  for (Role role : kAllRoles) {
    out[std::string(RoleName(role)) + ".f1"] =
        report.elements[static_cast<std::size_t>(role)].f1;
  }
  out["explicit.f1"] = report.explicit_subset.f1;
  out["implicit.f1"] = report.implicit_subset.f1;
  return out;
}

ProtocolReport Summarize(std::vector<Episode> episodes,
                         std::vector<EvalReport> runs) {
  ProtocolReport report;
  report.episodes = std::move(episodes);
  report.runs = std::move(runs);
  std::map<std::string, std::vector<double>> columns;
  for (const auto &run : report.runs) {
    for (const auto &[name, value] : FlattenMetrics(run)) columns[name].push_back(value);
  }
  for (const auto &[name, values] : columns) {
    report.summary[name] = ComputeMoments(values);
  }
  return report;
}

ProtocolReport RunProtocol(const Dataset &pool, std::span<const Episode> episodes,
                           const EpisodePipeline &pipeline) {
  if (episodes.empty()) throw Error(ErrorCode::kInvalidArgument, "no episodes to run");
  std::vector<EvalReport> runs;
  for (const auto &episode : episodes) {
    runs.push_back(pipeline(episode, Materialize(pool, episode)));
  }
  return Summarize({episodes.begin(), episodes.end()}, std::move(runs));
}

}  // namespace bvsp
